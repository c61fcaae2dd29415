import logging
from abc import ABC, abstractmethod
from typing import Dict, Optional, Tuple, Type

import numpy as np

from dynrank.core.engine.kernels import mark_out_neighbors, pull_ranks
from dynrank.core.engine.marking import (check_snapshot_pair, mark_initial_affected_into, mark_reachable_into,
                                         new_flags)
from dynrank.core.engine.parameters import Approach, EngineConfig
from dynrank.core.engine.result import AffectedFlags, IterationCallback, IterationInfo, RankVector, RunResult
from dynrank.core.engine.scheduler import ChunkScheduler
from dynrank.core.graph.snapshot import VERTEX_DTYPE, BatchUpdate, ContractViolationError, GraphSnapshot
from dynrank.core.log import default_log
from dynrank.core.timer import Timer


class EmptyGraphError(ValueError):
    """ Raised when ranks are requested for a graph without vertices """
    pass


class PageRankEngine(ABC):
    """Base class for the PageRank strategies.

    Subclasses choose the seed ranks and which vertices are processed in
    each iteration; the power iteration itself is shared. Buffers are
    allocated before the timed region, so ``RunResult.elapsed`` covers
    marking, rank computation and convergence checks only.

    Args:
        config: engine parameters
        iteration_callback: optional function called with :class:`IterationInfo` after every iteration
        cap_expected: the run is meant to stop at ``max_iterations``, so reaching it is logged at debug level
    """

    approach: Approach

    def __init__(self, config: Optional[EngineConfig] = None,
                 iteration_callback: Optional[IterationCallback] = None, cap_expected: bool = False):
        self.config = config or EngineConfig()
        self._iteration_callback = iteration_callback
        self._unconverged_level = logging.DEBUG if cap_expected else logging.WARNING
        self.log = default_log(self)

    @abstractmethod
    def update(self, prev_graph: Optional[GraphSnapshot], graph: GraphSnapshot,
               batch: Optional[BatchUpdate], prev_ranks: Optional[RankVector]) -> RunResult:
        """ Computes ranks of ``graph`` given the previous snapshot, the batch between them
        and the previous ranks. Strategies ignore the inputs they do not need. """
        raise NotImplementedError()

    @staticmethod
    def _check_graph(graph: GraphSnapshot):
        if graph.n == 0:
            raise EmptyGraphError('PageRank is undefined for a graph without vertices')
        if not graph.is_normalized:
            raise ContractViolationError('Graph has vertices without self-loops, apply add_self_loops first')

    @staticmethod
    def _seed_from(graph: GraphSnapshot, prev_ranks: Optional[RankVector]) -> RankVector:
        if prev_ranks is None:
            raise ContractViolationError('Dynamic approaches need the ranks of the previous snapshot')
        prev_ranks = np.asarray(prev_ranks, dtype=np.float64)
        if prev_ranks.shape != (graph.n,):
            raise ContractViolationError(f'Previous ranks have length {len(prev_ranks)}, graph has {graph.n} vertices')
        return prev_ranks.copy()

    def _power_iterate(self, graph: GraphSnapshot, ranks: RankVector,
                       flags: Optional[AffectedFlags], expand_frontier: bool) -> Tuple[RankVector, int, int, bool]:
        """ Runs iterations until the largest rank change is within ``tau``.

        With ``flags`` set only flagged vertices are processed, and the set is
        captured at the start of every iteration. With ``expand_frontier`` a
        vertex whose rank moved by more than the frontier tolerance flags its
        out-neighbors for the following iterations.

        Returns:
            final ranks, iteration count, number of rank computations and the convergence flag
        """
        config = self.config
        alpha = config.alpha
        frontier_tolerance = config.frontier_tolerance
        buffer = np.empty_like(ranks) if config.is_synchronous else ranks
        all_vertices = np.arange(graph.n, dtype=VERTEX_DTYPE)

        iterations = 0
        rank_updates = 0
        converged = False
        with ChunkScheduler(config.threads, config.chunk_size) as scheduler:
            for iteration in range(1, config.max_iterations + 1):
                vertices = all_vertices if flags is None else np.flatnonzero(flags).astype(VERTEX_DTYPE)
                source, target = ranks, buffer

                def process(chunk: np.ndarray) -> float:
                    previous = source[chunk]
                    values = pull_ranks(graph, source, chunk, alpha)
                    target[chunk] = values
                    delta = np.abs(values - previous)
                    if expand_frontier:
                        mark_out_neighbors(flags, graph, chunk[delta > frontier_tolerance])
                    return float(delta.max()) if len(delta) else 0.0

                delta = max(scheduler.map(process, vertices), default=0.0)
                iterations = iteration
                rank_updates += len(vertices)

                if config.is_synchronous:
                    if flags is None:
                        ranks, buffer = buffer, ranks
                    else:
                        ranks[vertices] = buffer[vertices]

                if self._iteration_callback is not None:
                    self._iteration_callback(IterationInfo(iteration=iteration, ranks=ranks, flags=flags,
                                                           delta=delta, processed=len(vertices)))
                if delta <= config.tau:
                    converged = True
                    break
        return ranks, iterations, rank_updates, converged

    def _run(self, graph: GraphSnapshot, ranks: RankVector, flags: Optional[AffectedFlags] = None,
             mark=None, expand_frontier: bool = False) -> RunResult:
        with Timer() as timer:
            if mark is not None:
                mark(flags)
            ranks, iterations, rank_updates, converged = self._power_iterate(graph, ranks, flags, expand_frontier)
        affected_final = graph.n if flags is None else int(np.count_nonzero(flags))
        if not converged:
            self.log.log(self._unconverged_level,
                         f'{self.approach.value} did not converge within {iterations} iterations')
        self.log.debug(f'{self.approach.value}/{self.config.mode.value}: {iterations} iterations, '
                       f'{rank_updates} rank updates, {affected_final} affected, {timer.seconds:.6f} s')
        return RunResult(ranks=ranks, iterations=iterations, rank_updates=rank_updates,
                         affected_final=affected_final, elapsed=timer.seconds, converged=converged,
                         approach=self.approach, mode=self.config.mode, affected=flags)


class StaticPageRank(PageRankEngine):
    """ Power iteration over all vertices from the uniform rank vector ``1/n`` """
    approach = Approach.static

    def run(self, graph: GraphSnapshot) -> RunResult:
        self._check_graph(graph)
        return self._run(graph, np.full(graph.n, 1.0 / graph.n))

    def update(self, prev_graph, graph, batch, prev_ranks) -> RunResult:
        return self.run(graph)


class NaiveDynamicPageRank(PageRankEngine):
    """ Power iteration over all vertices seeded with the previous ranks """
    approach = Approach.naive

    def run(self, graph: GraphSnapshot, prev_ranks: RankVector) -> RunResult:
        self._check_graph(graph)
        return self._run(graph, self._seed_from(graph, prev_ranks))

    def update(self, prev_graph, graph, batch, prev_ranks) -> RunResult:
        return self.run(graph, prev_ranks)


class DynamicTraversalPageRank(PageRankEngine):
    """ Recomputes only vertices reachable from the updated edges; the rest keep previous ranks """
    approach = Approach.traversal

    def update(self, prev_graph: GraphSnapshot, graph: GraphSnapshot, batch: BatchUpdate,
               prev_ranks: RankVector) -> RunResult:
        self._check_graph(graph)
        check_snapshot_pair(prev_graph, graph)
        ranks = self._seed_from(graph, prev_ranks)
        flags = new_flags(graph.n)
        return self._run(graph, ranks, flags,
                         mark=lambda into: mark_reachable_into(into, prev_graph, graph, batch))


class DynamicFrontierPageRank(PageRankEngine):
    """Grows the set of affected vertices while iterating.

    Initially the sources of the updated edges and their out-neighbors in
    either snapshot are affected; a source's out-degree changes, so its
    self-loop share changes with it.
    Whenever the rank of an affected vertex changes by more than the frontier
    tolerance, its out-neighbors become affected too. Vertices never marked
    keep their previous ranks bit for bit.
    """
    approach = Approach.frontier

    def update(self, prev_graph: GraphSnapshot, graph: GraphSnapshot, batch: BatchUpdate,
               prev_ranks: RankVector) -> RunResult:
        self._check_graph(graph)
        check_snapshot_pair(prev_graph, graph)
        ranks = self._seed_from(graph, prev_ranks)
        flags = new_flags(graph.n)
        return self._run(graph, ranks, flags,
                         mark=lambda into: self._mark_initial(into, prev_graph, graph, batch),
                         expand_frontier=True)

    @staticmethod
    def _mark_initial(flags: AffectedFlags, prev_graph: GraphSnapshot, graph: GraphSnapshot, batch: BatchUpdate):
        mark_initial_affected_into(flags, prev_graph, graph, batch)
        flags[batch.sources()] = 1


ENGINES: Dict[Approach, Type[PageRankEngine]] = {
    Approach.static: StaticPageRank,
    Approach.naive: NaiveDynamicPageRank,
    Approach.traversal: DynamicTraversalPageRank,
    Approach.frontier: DynamicFrontierPageRank,
}


def static_pagerank(graph: GraphSnapshot, config: Optional[EngineConfig] = None,
                    iteration_callback: Optional[IterationCallback] = None) -> RunResult:
    return StaticPageRank(config, iteration_callback).run(graph)


def naive_dynamic_pagerank(graph: GraphSnapshot, prev_ranks: RankVector, config: Optional[EngineConfig] = None,
                           iteration_callback: Optional[IterationCallback] = None) -> RunResult:
    return NaiveDynamicPageRank(config, iteration_callback).run(graph, prev_ranks)


def dynamic_traversal_pagerank(prev_graph: GraphSnapshot, graph: GraphSnapshot, batch: BatchUpdate,
                               prev_ranks: RankVector, config: Optional[EngineConfig] = None,
                               iteration_callback: Optional[IterationCallback] = None) -> RunResult:
    return DynamicTraversalPageRank(config, iteration_callback).update(prev_graph, graph, batch, prev_ranks)


def dynamic_frontier_pagerank(prev_graph: GraphSnapshot, graph: GraphSnapshot, batch: BatchUpdate,
                              prev_ranks: RankVector, config: Optional[EngineConfig] = None,
                              iteration_callback: Optional[IterationCallback] = None) -> RunResult:
    return DynamicFrontierPageRank(config, iteration_callback).update(prev_graph, graph, batch, prev_ranks)


def pagerank(approach, prev_graph: Optional[GraphSnapshot], graph: GraphSnapshot,
             batch: Optional[BatchUpdate] = None, prev_ranks: Optional[RankVector] = None,
             config: Optional[EngineConfig] = None,
             iteration_callback: Optional[IterationCallback] = None) -> RunResult:
    """ Runs the strategy named by ``approach`` (an :class:`Approach` or its value) """
    engine_cls = ENGINES[Approach(approach)]
    return engine_cls(config, iteration_callback).update(prev_graph, graph, batch or BatchUpdate(), prev_ranks)
