from typing import Tuple

import numpy as np

from dynrank.core.engine.result import AffectedFlags, RankVector
from dynrank.core.graph.snapshot import GraphSnapshot, VERTEX_DTYPE


def gather_rows(indptr: np.ndarray, rows: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """ Positions of all entries of the given CSR rows, in row order.

    Args:
        indptr: CSR offsets
        rows: sorted row ids

    Returns:
        positions into the indices array, start offset of every row within
        ``positions`` and the length of every row
    """
    starts = indptr[rows]
    lengths = indptr[rows + 1] - starts
    if len(rows) == 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty, empty
    if rows[-1] - rows[0] + 1 == len(rows):
        # contiguous block of rows is one slice
        return np.arange(starts[0], indptr[rows[-1] + 1]), starts - starts[0], lengths
    offsets = np.zeros(len(rows), dtype=np.int64)
    np.cumsum(lengths[:-1], out=offsets[1:])
    positions = np.repeat(starts - offsets, lengths) + np.arange(offsets[-1] + lengths[-1])
    return positions, offsets, lengths


def rank_of(v: int, graph: GraphSnapshot, ranks: RankVector, alpha: float) -> float:
    """ Rank of ``v`` pulled from its in-neighbors:
    ``(1 - alpha) / n + alpha * sum(R[u] / |out(u)|)`` over ``u`` in ``in(v)`` """
    neighbors = graph.in_adj(v)
    return (1 - alpha) / graph.n + alpha * float(np.sum(ranks[neighbors] / graph.out_degree[neighbors]))


def pull_ranks(graph: GraphSnapshot, ranks: RankVector, rows: np.ndarray, alpha: float) -> np.ndarray:
    """ Vectorized :func:`rank_of` over sorted vertex ids ``rows``.
    Every row must have at least one in-neighbor, which normalization guarantees. """
    if len(rows) == 0:
        return np.empty(0, dtype=np.float64)
    positions, offsets, _ = gather_rows(graph.in_indptr, rows)
    neighbors = graph.in_indices[positions]
    contributions = ranks[neighbors] / graph.out_degree[neighbors]
    return (1 - alpha) / graph.n + alpha * np.add.reduceat(contributions, offsets)


def mark_out_neighbors(flags: AffectedFlags, graph: GraphSnapshot, vertices: np.ndarray):
    """ Flags every out-neighbor of ``vertices`` except the vertex itself.
    Stores are idempotent writes of 1, so concurrent callers are safe. """
    if len(vertices) == 0:
        return
    vertices = np.asarray(vertices, dtype=VERTEX_DTYPE)
    positions, _, lengths = gather_rows(graph.out_indptr, vertices)
    targets = graph.out_indices[positions]
    owners = np.repeat(vertices, lengths)
    flags[targets[targets != owners]] = 1
