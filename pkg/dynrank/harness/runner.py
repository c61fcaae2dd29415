import dataclasses
import os
from collections import defaultdict
from itertools import product
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from joblib import Parallel, delayed

from dynrank.core.batch import BatchSpec, generate_batch
from dynrank.core.constants import SPOT_CHECK_MAX_VERTICES
from dynrank.core.engine import Approach, EngineConfig, RankMode, RunResult, mark_reachable, pagerank, static_pagerank
from dynrank.core.engine.result import RankVector
from dynrank.core.graph import BatchUpdate, GraphSnapshot, add_self_loops, apply_batch, load_graph
from dynrank.core.log import Log, default_log
from dynrank.core.timer import Timer
from dynrank.harness.metrics import check_containment, check_skip_contract, geometric_mean, l1_error, reference_ranks
from dynrank.harness.plan import ExperimentPlan, ExperimentRecord
from dynrank.utilities.utilities import determine_threads

# frontier tolerance is tau divided by each of these
DEFAULT_TOLERANCE_DIVISORS = (1, 10, 100, 1e3, 1e4, 1e5)

_FAILED_CELL_ERRORS = (ValueError, OSError, ArithmeticError)


def graph_name(source: str) -> str:
    """ Short label of a graph source for reports """
    if os.path.exists(source):
        return os.path.splitext(os.path.basename(source))[0]
    return source


@dataclasses.dataclass
class PreparedBatch:
    """ A snapshot pair with everything computed outside the timed region """
    prev_graph: GraphSnapshot
    graph: GraphSnapshot
    batch: BatchUpdate
    preprocess_s: float
    reference: RankVector


class ExperimentRunner:
    """Executes the cells of an :class:`ExperimentPlan` one after another.

    For each batch the next snapshot and the reference ranks are built once
    and shared by all modes, thread counts and approaches of that batch.
    Dynamic approaches start from a static run on the previous snapshot with
    the same engine parameters. A cell that raises is reported as a record
    with the error text instead of aborting the sweep.

    Args:
        plan: the experiment grid
        tolerance_divisors: when given, the frontier engine is run once per
            frontier tolerance ``tau / d`` instead of with the configured one
    """

    def __init__(self, plan: ExperimentPlan, tolerance_divisors: Optional[Sequence[float]] = None):
        self.plan = plan
        self.tolerance_divisors = tolerance_divisors
        self.log = default_log(self)

    def __iter__(self) -> Iterator[ExperimentRecord]:
        for source in self.plan.graphs:
            yield from self.iter_graph(source)

    def iter_graph(self, source: str) -> Iterator[ExperimentRecord]:
        name = graph_name(source)
        try:
            prev_graph = add_self_loops(load_graph(source, self.plan.base))
        except _FAILED_CELL_ERRORS as ex:
            self.log.error(f'Can not load graph {source}: {ex}')
            for fraction, (repetition, seed) in product(self.plan.fractions, enumerate(self.plan.repetition_seeds)):
                yield from self._failed_cells(name, fraction, repetition, seed, ex)
            return
        self.log.info(f'Loaded {name}: n={prev_graph.n}, m={prev_graph.m}')

        seed_cache: Dict[Tuple[RankMode, int], RankVector] = {}
        for fraction in self.plan.fractions:
            for repetition, seed in enumerate(self.plan.repetition_seeds):
                try:
                    prepared = self.prepare_batch(prev_graph, BatchSpec(fraction, self.plan.insert_ratio, seed))
                except _FAILED_CELL_ERRORS as ex:
                    self.log.error(f'Can not prepare batch for {name}, fraction={fraction}, seed={seed}: {ex}')
                    yield from self._failed_cells(name, fraction, repetition, seed, ex)
                    continue
                for mode, threads in product(self.plan.modes, self.plan.threads):
                    base = self.plan.engine_config(mode, threads)
                    key = dict(graph=name, mode=mode.value, fraction=fraction, insert_ratio=self.plan.insert_ratio,
                               repetition=repetition, threads=base.threads, seed=seed)
                    try:
                        seed_ranks = self._seed_ranks(prev_graph, base, seed_cache)
                    except _FAILED_CELL_ERRORS as ex:
                        for approach in self.plan.approaches:
                            yield ExperimentRecord(approach=approach.value, error=str(ex), **key)
                        continue
                    yield from self._run_approaches(prepared, seed_ranks, base, key)

    def prepare_batch(self, prev_graph: GraphSnapshot, spec: BatchSpec) -> PreparedBatch:
        batch = generate_batch(prev_graph, spec)
        with Timer() as timer:
            graph = apply_batch(prev_graph, batch, strict=self.plan.strict)
        return PreparedBatch(prev_graph=prev_graph, graph=graph, batch=batch, preprocess_s=timer.seconds,
                             reference=reference_ranks(graph))

    def configs_for(self, approach: Approach, base: EngineConfig) -> List[EngineConfig]:
        if approach is Approach.frontier and self.tolerance_divisors:
            return [dataclasses.replace(base, tau_f=base.tau / divisor) for divisor in self.tolerance_divisors]
        return [base]

    def _run_approaches(self, prepared: PreparedBatch, seed_ranks: RankVector, base: EngineConfig,
                        key: dict) -> Iterator[ExperimentRecord]:
        results: Dict[Approach, RunResult] = {}
        for approach in self.plan.approaches:
            for config in self.configs_for(approach, base):
                try:
                    result = pagerank(approach, prepared.prev_graph, prepared.graph, prepared.batch,
                                      seed_ranks, config)
                except _FAILED_CELL_ERRORS as ex:
                    self.log.error(f'{approach.value} failed on {key["graph"]}: {ex}')
                    yield ExperimentRecord(approach=approach.value, tau_f=config.frontier_tolerance, error=str(ex),
                                           **key)
                    continue
                record = make_record(result, prepared, config, key)
                self.log.info(f'{record.graph} {record.approach}/{record.mode} fraction={record.fraction} '
                              f'rep={record.repetition} threads={record.threads}: {record.elapsed_s:.6f} s, '
                              f'{record.iterations} iterations, {record.rank_updates} updates, '
                              f'L1 error {record.l1_error:.3e}')
                results[approach] = result
                if self.plan.check_invariants and prepared.graph.n <= SPOT_CHECK_MAX_VERTICES:
                    check_skip_contract(result, seed_ranks)
                yield record
        if self.plan.check_invariants and prepared.graph.n <= SPOT_CHECK_MAX_VERTICES:
            self._check_containment(prepared, results)

    @staticmethod
    def _check_containment(prepared: PreparedBatch, results: Dict[Approach, RunResult]):
        frontier = results.get(Approach.frontier)
        if frontier is None:
            return
        traversal = results.get(Approach.traversal)
        reachable = (traversal.affected if traversal is not None
                     else mark_reachable(prepared.prev_graph, prepared.graph, prepared.batch))
        check_containment(frontier, reachable)

    @staticmethod
    def _seed_ranks(prev_graph: GraphSnapshot, config: EngineConfig,
                    cache: Dict[Tuple[RankMode, int], RankVector]) -> RankVector:
        cache_key = (config.mode, config.threads)
        if cache_key not in cache:
            cache[cache_key] = static_pagerank(prev_graph, config).ranks
        return cache[cache_key]

    def _failed_cells(self, name: str, fraction: float, repetition: int, seed: int,
                      ex: BaseException) -> Iterator[ExperimentRecord]:
        for mode, threads, approach in product(self.plan.modes, self.plan.threads, self.plan.approaches):
            yield ExperimentRecord(graph=name, approach=approach.value, mode=mode.value, fraction=fraction,
                                   insert_ratio=self.plan.insert_ratio, repetition=repetition,
                                   threads=determine_threads(threads), seed=seed, error=str(ex))


def make_record(result: RunResult, prepared: PreparedBatch, config: EngineConfig, key: dict) -> ExperimentRecord:
    return ExperimentRecord(approach=result.approach.value,
                            elapsed_s=result.elapsed,
                            preprocess_s=prepared.preprocess_s,
                            iterations=result.iterations,
                            rank_updates=result.rank_updates,
                            affected_final=result.affected_final,
                            affected_fraction=result.affected_fraction,
                            l1_error=l1_error(result.ranks, prepared.reference),
                            converged=result.converged,
                            tau_f=config.frontier_tolerance,
                            **key)


def iter_experiment(plan: ExperimentPlan) -> Iterator[ExperimentRecord]:
    """ Yields records cell by cell, so that callers can flush partial results """
    return iter(ExperimentRunner(plan))


def _graph_records(plan: ExperimentPlan, logs_initializer: Optional[tuple] = None) -> List[ExperimentRecord]:
    if logs_initializer is not None:
        # in case of multiprocessing run
        Log.setup_in_mp(*logs_initializer)
    return list(ExperimentRunner(plan))


def run_experiment(plan: ExperimentPlan, parallel_cells: bool = False, n_jobs: int = -1) -> List[ExperimentRecord]:
    """ Runs the whole grid.

    Args:
        plan: the experiment grid
        parallel_cells: process graphs in separate worker processes. Timings of
            concurrent cells interfere, so this is meant for correctness sweeps only
        n_jobs: number of worker processes for ``parallel_cells``

    Returns:
        records in grid order
    """
    if not parallel_cells or len(plan.graphs) < 2:
        return list(iter_experiment(plan))
    parallel = Parallel(n_jobs=n_jobs, verbose=0, pre_dispatch='2*n_jobs')
    per_graph = parallel(delayed(_graph_records)(plan.for_graph(source), Log().get_parameters())
                         for source in plan.graphs)
    return [record for records in per_graph for record in records]


def add_speedups(records: List[ExperimentRecord]) -> List[ExperimentRecord]:
    """ Sets ``speedup`` of every record to the ratio of geometric-mean elapsed times
    of the single-thread runs and the runs of its own thread count in the same group """
    groups = defaultdict(lambda: defaultdict(list))
    for record in records:
        if record.failed or not record.elapsed_s:
            continue
        group = (record.graph, record.approach, record.mode, record.fraction, record.tau_f)
        groups[group][record.threads].append(record.elapsed_s)
    for record in records:
        if record.failed:
            continue
        timings = groups[(record.graph, record.approach, record.mode, record.fraction, record.tau_f)]
        if timings.get(1) and timings.get(record.threads):
            record.speedup = geometric_mean(timings[1]) / geometric_mean(timings[record.threads])
    return records


def iter_scaling_sweep(plan: ExperimentPlan) -> Iterator[ExperimentRecord]:
    """ Yields frontier records for every thread count of the plan and for a single
    thread, which is added to the sweep when missing. Speedups are left unset. """
    threads = sorted({determine_threads(count) for count in plan.threads} | {1})
    return iter_experiment(dataclasses.replace(plan, approaches=[Approach.frontier], threads=threads))


def scaling_sweep(plan: ExperimentPlan) -> List[ExperimentRecord]:
    """ Runs the frontier engine for every thread count of the plan and reports speedups
    over the single-thread run """
    return add_speedups(list(iter_scaling_sweep(plan)))


def frontier_tolerance_sweep(plan: ExperimentPlan,
                             divisors: Sequence[float] = DEFAULT_TOLERANCE_DIVISORS) -> List[ExperimentRecord]:
    """ Runs the frontier engine with ``tau_f = tau / d`` for every divisor ``d``.
    Static runs, when the plan includes them, give the error baseline. """
    if not divisors:
        raise ValueError('Frontier tolerance sweep needs at least one divisor')
    for divisor in divisors:
        if divisor < 1:
            raise ValueError(f'Tolerance divisors must be at least 1, got {divisor}')
    approaches = [approach for approach in plan.approaches if approach in (Approach.static, Approach.frontier)]
    if Approach.frontier not in approaches:
        approaches.append(Approach.frontier)
    sweep_plan = dataclasses.replace(plan, approaches=approaches)
    return list(ExperimentRunner(sweep_plan, tolerance_divisors=divisors))


def run_single(source: str, approach, spec: BatchSpec, config: EngineConfig, base: int = 0,
               strict: bool = True) -> Tuple[ExperimentRecord, RunResult]:
    """ Runs one approach on one generated batch, returning the record and the full result """
    plan = ExperimentPlan(graphs=[source], approaches=[approach], mode=config.mode.value,
                          fractions=[spec.fraction], insert_ratio=spec.insert_ratio, repetitions=1,
                          seeds=[spec.seed], threads=[config.threads], config=config, base=base, strict=strict)
    runner = ExperimentRunner(plan)
    prev_graph = add_self_loops(load_graph(source, base))
    prepared = runner.prepare_batch(prev_graph, spec)
    seed_ranks = None
    approach = Approach(approach)
    if approach.is_dynamic:
        seed_ranks = static_pagerank(prev_graph, config).ranks
    result = pagerank(approach, prepared.prev_graph, prepared.graph, prepared.batch, seed_ranks, config)
    key = dict(graph=graph_name(source), mode=config.mode.value, fraction=spec.fraction,
               insert_ratio=spec.insert_ratio, repetition=0, threads=config.threads, seed=spec.seed)
    return make_record(result, prepared, config, key), result
