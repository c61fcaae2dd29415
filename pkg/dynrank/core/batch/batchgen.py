import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from dynrank.core.constants import DEFAULT_INSERT_RATIO, INSERTION_RETRY_FACTOR
from dynrank.core.graph.snapshot import VERTEX_DTYPE, BatchUpdate, ContractViolationError, GraphSnapshot
from dynrank.core.log import default_log
from dynrank.utilities.random import make_rng


class BatchGenerationError(ValueError):
    """ Raised when the requested insertions can not be placed within the retry budget """
    pass


@dataclass(frozen=True)
class BatchSpec:
    """Random batch parameters.

    :param fraction: batch size as a fraction of the edge count, in [0, 1]
    :param insert_ratio: share of insertions in the batch; 1.0 means insertions only, 0.0 deletions only
    :param seed: 64-bit seed of the generator
    """
    fraction: float
    insert_ratio: float = DEFAULT_INSERT_RATIO
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.fraction <= 1:
            raise ValueError(f'Batch fraction must lie in [0, 1], got {self.fraction}')
        if not 0 <= self.insert_ratio <= 1:
            raise ValueError(f'Insert ratio must lie in [0, 1], got {self.insert_ratio}')
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError(f'Seed must be a 64-bit unsigned integer, got {self.seed}')


def _round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


def batch_counts(m: int, spec: BatchSpec, insertable: Optional[int] = None,
                 deletable: Optional[int] = None) -> Tuple[int, int]:
    """Numbers of insertions and deletions for a graph with ``m`` edges.

    A nonzero fraction of a nonzero graph asks for at least one update. That
    single update is an insertion or a deletion following ``insert_ratio``,
    the other kind if the preferred one has no room, and nothing if neither has.

    Args:
        m: edge count
        spec: batch parameters
        insertable: number of vertex pairs that can still become edges, unbounded if ``None``
        deletable: number of edges other than self-loops, unbounded if ``None``
    """
    size = spec.fraction * m
    insertions = _round_half_up(size * spec.insert_ratio)
    deletions = _round_half_up(size * (1 - spec.insert_ratio))
    if insertions + deletions == 0 and spec.fraction > 0 and m > 0:
        can_insert = insertable is None or insertable > 0
        can_delete = deletable is None or deletable > 0
        if can_insert and (spec.insert_ratio >= 0.5 or not can_delete):
            insertions = 1
        elif can_delete:
            deletions = 1
    return insertions, deletions


def _sample_deletions(graph: GraphSnapshot, count: int, rng: np.random.Generator) -> np.ndarray:
    if count == 0:
        return np.empty((0, 2), dtype=VERTEX_DTYPE)
    edges = graph.edges()
    candidates = edges[edges[:, 0] != edges[:, 1]]
    if count > len(candidates):
        raise ContractViolationError(f'Requested {count} deletions, the graph has only '
                                     f'{len(candidates)} edges besides self-loops')
    chosen = rng.choice(len(candidates), size=count, replace=False)
    return candidates[np.sort(chosen)]


def _sample_insertions(graph: GraphSnapshot, count: int, rng: np.random.Generator) -> np.ndarray:
    n = graph.n
    if count == 0:
        return np.empty((0, 2), dtype=VERTEX_DTYPE)
    budget = INSERTION_RETRY_FACTOR * count
    keys = np.empty(0, dtype=np.int64)
    draws = 0
    while len(keys) < count:
        if draws >= budget:
            raise BatchGenerationError(f'Placed {len(keys)} of {count} insertions after {draws} draws, '
                                       f'the graph is too dense')
        block = min(max(2 * (count - len(keys)), 16), budget - draws)
        draws += block
        sources = rng.integers(0, n, size=block, dtype=np.int64)
        targets = rng.integers(0, n, size=block, dtype=np.int64)
        fresh = sources * n + targets
        fresh = fresh[sources != targets]
        fresh = fresh[~np.isin(fresh, graph.keys) & ~np.isin(fresh, keys)]
        _, first = np.unique(fresh, return_index=True)
        fresh = fresh[np.sort(first)]
        keys = np.concatenate([keys, fresh[:count - len(keys)]])
    return np.column_stack([keys // n, keys % n]).astype(VERTEX_DTYPE)


def generate_batch(graph: GraphSnapshot, spec: BatchSpec) -> BatchUpdate:
    """ Draws a random batch of edge updates for ``graph``.

    Deletions are a uniform sample without replacement of the existing edges
    other than self-loops. Insertions are uniform ordered pairs ``u != v`` that
    are not edges of the graph, drawn until enough distinct ones are found.
    Identical graph and spec give an identical batch.

    Args:
        graph: normalized snapshot
        spec: batch parameters

    Returns:
        BatchUpdate: a batch satisfying the strict preconditions of ``apply_batch``
    """
    if not graph.is_normalized:
        raise ContractViolationError('Batches are generated for normalized graphs, apply add_self_loops first')
    loose_edges = graph.m - graph.n
    insertions, deletions = batch_counts(graph.m, spec, insertable=graph.n * (graph.n - 1) - loose_edges,
                                         deletable=loose_edges)
    rng = make_rng(spec.seed)
    deleted = _sample_deletions(graph, deletions, rng)
    inserted = _sample_insertions(graph, insertions, rng)
    default_log('generate_batch').debug(f'Generated {len(inserted)} insertions and {len(deleted)} deletions '
                                        f'for {graph} with seed {spec.seed}')
    return BatchUpdate(deletions=deleted, insertions=inserted)
