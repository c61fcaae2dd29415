from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from dynrank.core.log import default_log

# 32-bit vertex ids; edge offsets are 64-bit so that edge counts may exceed 2**31
VERTEX_DTYPE = np.int32
OFFSET_DTYPE = np.int64

EdgeArray = np.ndarray  # shape (k, 2), dtype VERTEX_DTYPE, rows are (source, target)


class ContractViolationError(ValueError):
    """ Raised when a caller breaks a precondition of a graph or rank operation """
    pass


def _readonly(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


def _as_edge_array(pairs: Optional[Iterable[Tuple[int, int]]]) -> EdgeArray:
    if pairs is None:
        return np.empty((0, 2), dtype=np.int64)
    array = np.asarray(pairs if isinstance(pairs, np.ndarray) else list(pairs), dtype=np.int64)
    if array.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    if array.ndim != 2 or array.shape[1] != 2:
        raise ContractViolationError(f'Edges must be pairs of vertex ids, got array of shape {array.shape}')
    return array


def _edge_keys(edges: np.ndarray, n: int) -> np.ndarray:
    """ Encodes (u, v) as u * n + v; keys sort in (source, target) order """
    return edges[:, 0].astype(np.int64) * n + edges[:, 1].astype(np.int64)


def _check_vertex_range(edges: np.ndarray, n: int, what: str):
    if edges.size and (edges.min() < 0 or edges.max() >= n):
        bad = edges[(edges < 0).any(axis=1) | (edges >= n).any(axis=1)][0]
        raise ContractViolationError(f'{what} ({bad[0]}, {bad[1]}) references a vertex outside [0, {n})')


class GraphSnapshot:
    """Immutable read-optimized directed graph.

    Out- and in-adjacency are both stored in compressed sparse row form
    (offsets + sorted neighbor ids), so that pulls over ``in_adj(v)`` and
    frontier marking over ``out_adj(v)`` are contiguous reads. Arrays are
    marked read-only; snapshots are safe to share between threads.

    Snapshots are normally built with :meth:`from_edges`, :func:`add_self_loops`
    or :func:`apply_batch` rather than with the constructor.

    Args:
        n: number of vertices
        keys: sorted unique edge keys ``u * n + v``
    """

    def __init__(self, n: int, keys: np.ndarray):
        self._n = int(n)
        keys = np.asarray(keys, dtype=np.int64)
        sources = (keys // n).astype(VERTEX_DTYPE) if n else np.empty(0, VERTEX_DTYPE)
        targets = (keys % n).astype(VERTEX_DTYPE) if n else np.empty(0, VERTEX_DTYPE)

        out_degree = np.bincount(sources, minlength=self._n).astype(VERTEX_DTYPE)
        in_degree = np.bincount(targets, minlength=self._n)
        self._out_indptr = _readonly(self._offsets(out_degree))
        self._out_indices = _readonly(targets)
        # stable sort by target keeps sources ascending within each in-list
        order = np.argsort(targets, kind='stable')
        self._in_indptr = _readonly(self._offsets(in_degree))
        self._in_indices = _readonly(sources[order])
        self._out_degree = _readonly(out_degree)
        self._keys = _readonly(keys)

    @staticmethod
    def _offsets(degree: np.ndarray) -> np.ndarray:
        indptr = np.zeros(len(degree) + 1, dtype=OFFSET_DTYPE)
        np.cumsum(degree, out=indptr[1:])
        return indptr

    @classmethod
    def from_edges(cls, n: int, edges: Optional[Iterable[Tuple[int, int]]] = None) -> 'GraphSnapshot':
        """ Builds a snapshot over vertices ``0..n-1``; duplicate edges collapse to one """
        if n < 0:
            raise ContractViolationError(f'Vertex count must be non-negative, got {n}')
        edges = _as_edge_array(edges)
        _check_vertex_range(edges, n, 'Edge')
        return cls(n, np.unique(_edge_keys(edges, n)))

    @property
    def n(self) -> int:
        return self._n

    @property
    def m(self) -> int:
        return len(self._out_indices)

    @property
    def out_degree(self) -> np.ndarray:
        return self._out_degree

    @property
    def out_indptr(self) -> np.ndarray:
        return self._out_indptr

    @property
    def out_indices(self) -> np.ndarray:
        return self._out_indices

    @property
    def in_indptr(self) -> np.ndarray:
        return self._in_indptr

    @property
    def in_indices(self) -> np.ndarray:
        return self._in_indices

    @property
    def keys(self) -> np.ndarray:
        """ Sorted edge keys ``u * n + v`` """
        return self._keys

    def out_adj(self, v: int) -> np.ndarray:
        return self._out_indices[self._out_indptr[v]:self._out_indptr[v + 1]]

    def in_adj(self, v: int) -> np.ndarray:
        return self._in_indices[self._in_indptr[v]:self._in_indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        neighbors = self.out_adj(u)
        pos = np.searchsorted(neighbors, v)
        return bool(pos < len(neighbors) and neighbors[pos] == v)

    def contains_edges(self, edges: EdgeArray) -> np.ndarray:
        """ Vectorized membership test; returns a boolean mask over ``edges`` rows """
        if len(edges) == 0 or self.m == 0:
            return np.zeros(len(edges), dtype=bool)
        keys = _edge_keys(edges, self._n)
        pos = np.minimum(np.searchsorted(self._keys, keys), self.m - 1)
        return self._keys[pos] == keys

    def edges(self) -> EdgeArray:
        sources = np.repeat(np.arange(self._n, dtype=VERTEX_DTYPE), self._out_degree)
        return np.column_stack([sources, self._out_indices])

    @property
    def self_loop_mask(self) -> np.ndarray:
        """ Boolean mask over vertices that have a self-loop """
        loops = self._keys[self._keys // max(self._n, 1) == self._keys % max(self._n, 1)]
        mask = np.zeros(self._n, dtype=bool)
        mask[loops // max(self._n, 1)] = True
        return mask

    @cached_property
    def is_normalized(self) -> bool:
        return bool(self.self_loop_mask.all())

    @property
    def average_degree(self) -> float:
        return self.m / self._n if self._n else 0.0

    def to_scipy(self) -> sp.csr_matrix:
        """ Adjacency matrix with ``A[u, v] = 1`` for every edge (u, v) """
        data = np.ones(self.m, dtype=np.float64)
        return sp.csr_matrix((data, self._out_indices, self._out_indptr), shape=(self._n, self._n))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GraphSnapshot):
            return NotImplemented
        return self._n == other._n and np.array_equal(self._keys, other._keys)

    def __hash__(self):
        return hash((self._n, self.m))

    def __repr__(self):
        return f'GraphSnapshot(n={self._n}, m={self.m})'


@dataclass(frozen=True)
class BatchUpdate:
    """Edge deletions and insertions turning one snapshot into the next.

    Both fields are ``(k, 2)`` arrays of ordered vertex pairs, sorted and free of
    duplicates. Deletions never contain self-loops and the two sets are disjoint.
    """
    deletions: EdgeArray = field(default_factory=lambda: np.empty((0, 2), dtype=VERTEX_DTYPE))
    insertions: EdgeArray = field(default_factory=lambda: np.empty((0, 2), dtype=VERTEX_DTYPE))

    def __post_init__(self):
        deletions = self._canonical(self.deletions)
        insertions = self._canonical(self.insertions)
        if deletions.size and (deletions[:, 0] == deletions[:, 1]).any():
            loop = deletions[deletions[:, 0] == deletions[:, 1]][0]
            raise ContractViolationError(f'Self-loop ({loop[0]}, {loop[1]}) can not be deleted')
        if deletions.size and insertions.size:
            common = (set(map(tuple, deletions.tolist())) & set(map(tuple, insertions.tolist())))
            if common:
                raise ContractViolationError(f'Edges {sorted(common)[:5]} are both deleted and inserted')
        object.__setattr__(self, 'deletions', _readonly(deletions))
        object.__setattr__(self, 'insertions', _readonly(insertions))

    @staticmethod
    def _canonical(pairs) -> EdgeArray:
        edges = _as_edge_array(pairs)
        if edges.size and edges.min() < 0:
            raise ContractViolationError('Batch contains negative vertex ids')
        edges = np.unique(edges, axis=0) if len(edges) else edges
        return edges.astype(VERTEX_DTYPE)

    @classmethod
    def from_pairs(cls, deletions: Iterable[Tuple[int, int]] = (),
                   insertions: Iterable[Tuple[int, int]] = ()) -> 'BatchUpdate':
        return cls(deletions=_as_edge_array(deletions), insertions=_as_edge_array(insertions))

    @property
    def size(self) -> int:
        return len(self.deletions) + len(self.insertions)

    @property
    def is_empty(self) -> bool:
        return self.size == 0

    def sources(self) -> np.ndarray:
        """ Unique source vertices of all updated edges """
        return np.unique(np.concatenate([self.deletions[:, 0], self.insertions[:, 0]])).astype(VERTEX_DTYPE)

    def inverse(self) -> 'BatchUpdate':
        """ Batch that undoes this one: insertions become deletions and vice versa """
        return BatchUpdate(deletions=self.insertions, insertions=self.deletions)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BatchUpdate):
            return NotImplemented
        return (np.array_equal(self.deletions, other.deletions)
                and np.array_equal(self.insertions, other.insertions))

    def __hash__(self):
        return hash((len(self.deletions), len(self.insertions)))


def add_self_loops(graph: GraphSnapshot) -> GraphSnapshot:
    """ Adds a self-loop to every vertex lacking one, which removes dead ends.
    Idempotent: a snapshot that is already normalized is returned as is. """
    missing = np.flatnonzero(~graph.self_loop_mask)
    if missing.size == 0:
        return graph
    loop_keys = missing.astype(np.int64) * graph.n + missing
    return GraphSnapshot(graph.n, np.union1d(graph.keys, loop_keys))


def apply_batch(graph: GraphSnapshot, batch: BatchUpdate, strict: bool = True) -> GraphSnapshot:
    """ Builds the next snapshot ``(E \\ deletions) ∪ insertions`` and re-normalizes it.

    The previous snapshot is not modified. In strict mode deleting a missing edge or
    inserting an existing one raises :class:`ContractViolationError`; in lenient mode
    such updates are skipped. Vertex ids outside ``[0, n)`` always raise.

    Args:
        graph: previous snapshot
        batch: edge deletions and insertions
        strict: whether to fail on redundant updates

    Returns:
        GraphSnapshot: the updated snapshot with self-loops on every vertex
    """
    _check_vertex_range(batch.deletions, graph.n, 'Deleted edge')
    _check_vertex_range(batch.insertions, graph.n, 'Inserted edge')

    deletions = batch.deletions
    insertions = batch.insertions
    missing = ~graph.contains_edges(deletions)
    existing = graph.contains_edges(insertions)
    if missing.any() or existing.any():
        if strict:
            problems = []
            if missing.any():
                problems.append(f'{int(missing.sum())} deleted edges are absent, '
                                f'e.g. {tuple(deletions[missing][0].tolist())}')
            if existing.any():
                problems.append(f'{int(existing.sum())} inserted edges already exist, '
                                f'e.g. {tuple(insertions[existing][0].tolist())}')
            raise ContractViolationError('Batch does not match the graph: ' + '; '.join(problems))
        default_log('apply_batch').debug(f'Skipped {int(missing.sum())} deletions and '
                                         f'{int(existing.sum())} insertions in lenient mode')
        deletions = deletions[~missing]
        insertions = insertions[~existing]

    keys = np.setdiff1d(graph.keys, _edge_keys(deletions, graph.n), assume_unique=True)
    keys = np.union1d(keys, _edge_keys(insertions, graph.n))
    return add_self_loops(GraphSnapshot(graph.n, keys))
