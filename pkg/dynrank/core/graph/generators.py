import numpy as np

from dynrank.core.graph.snapshot import ContractViolationError, GraphSnapshot
from dynrank.utilities.random import make_rng


def generate_random_graph(n: int, m: int, seed: int = 0) -> GraphSnapshot:
    """ Uniform random simple digraph with ``n`` vertices and ``m`` edges, no self-loops.

    Edges are drawn as independent vertex pairs and deduplicated until ``m``
    distinct ones are collected. Same arguments give the same graph.

    Returns:
        GraphSnapshot: un-normalized snapshot
    """
    if n < 0 or m < 0:
        raise ContractViolationError(f'Vertex and edge counts must be non-negative, got n={n}, m={m}')
    if m > n * (n - 1):
        raise ContractViolationError(f'A simple digraph on {n} vertices has at most {n * (n - 1)} edges, '
                                     f'requested {m}')
    rng = make_rng(seed)
    keys = np.empty(0, dtype=np.int64)
    while len(keys) < m:
        draw = max(2 * (m - len(keys)), 16)
        sources = rng.integers(0, n, size=draw, dtype=np.int64)
        targets = rng.integers(0, n, size=draw, dtype=np.int64)
        fresh = sources * n + targets
        fresh = fresh[sources != targets]
        fresh = fresh[~np.isin(fresh, keys)]
        # first occurrence order keeps the result independent of numpy's sort internals
        _, first = np.unique(fresh, return_index=True)
        fresh = fresh[np.sort(first)]
        keys = np.concatenate([keys, fresh[:m - len(keys)]])
    return GraphSnapshot(n, np.sort(keys))
