import os
from typing import Set, Tuple

import networkx as nx
import numpy as np

from dynrank.core.engine import EngineConfig, RankMode
from dynrank.core.graph import (BatchUpdate, GraphSnapshot, add_self_loops, apply_batch, generate_random_graph,
                                to_networkx)
from dynrank.utilities.random import make_rng

# the 16-vertex example: edges before the batch
EXAMPLE_EDGES = [(2, 1), (2, 4), (2, 8), (4, 3), (1, 3), (1, 5), (12, 11), (12, 14), (3, 4), (5, 6), (11, 15),
              (14, 15), (0, 2), (6, 7), (7, 0), (8, 9), (9, 10), (10, 12), (13, 12), (15, 13), (6, 9), (9, 2),
              (13, 0), (10, 7), (8, 0)]
EXAMPLE_DELETIONS = [(2, 1)]
EXAMPLE_INSERTIONS = [(4, 12)]


def data_path(file_name: str) -> str:
    return os.path.join(os.path.dirname(os.path.abspath(__file__)), '..', 'data', file_name)


def exact_config(**params) -> EngineConfig:
    """ Synchronous single-thread configuration tight enough for oracle comparisons """
    params.setdefault('tau', 1e-12)
    params.setdefault('mode', RankMode.synchronous)
    params.setdefault('threads', 1)
    return EngineConfig(**params)


def dense_oracle(graph: GraphSnapshot, alpha: float = 0.85) -> np.ndarray:
    """ Solves ``(I - alpha * P^T) r = (1 - alpha) / n`` directly """
    n = graph.n
    adjacency = graph.to_scipy().toarray()
    transition = adjacency / adjacency.sum(axis=1, keepdims=True)
    return np.linalg.solve(np.eye(n) - alpha * transition.T, np.full(n, (1 - alpha) / n))


def reachable_oracle(prev_graph: GraphSnapshot, graph: GraphSnapshot, batch: BatchUpdate) -> Set[int]:
    affected = set()
    for snapshot in (prev_graph, graph):
        nx_graph = to_networkx(snapshot)
        for source in batch.sources().tolist():
            affected.add(source)
            affected |= nx.descendants(nx_graph, source)
    return affected


def out_neighborhood_oracle(prev_graph: GraphSnapshot, graph: GraphSnapshot, batch: BatchUpdate) -> Set[int]:
    affected = set()
    for snapshot in (prev_graph, graph):
        for source in batch.sources().tolist():
            affected |= {v for v in snapshot.out_adj(source).tolist() if v != source}
    return affected


def flagged(flags: np.ndarray) -> Set[int]:
    return set(np.flatnonzero(flags).tolist())


def random_normalized_graph(n: int, m: int, seed: int = 0) -> GraphSnapshot:
    return add_self_loops(generate_random_graph(n, m, seed=seed))


def random_batch(graph: GraphSnapshot, deletions: int, insertions: int, seed: int = 0) -> BatchUpdate:
    """ Batch drawn independently of the library generator """
    rng = make_rng(seed)
    edges = [tuple(edge) for edge in graph.edges().tolist() if edge[0] != edge[1]]
    chosen = rng.choice(len(edges), size=deletions, replace=False) if deletions else []
    deleted = [edges[i] for i in chosen]
    inserted = set()
    while len(inserted) < insertions:
        u, v = (int(x) for x in rng.integers(0, graph.n, size=2))
        if u != v and not graph.has_edge(u, v):
            inserted.add((u, v))
    return BatchUpdate.from_pairs(deletions=deleted, insertions=sorted(inserted))


def random_snapshot_pair(n: int, m: int, deletions: int, insertions: int,
                         seed: int = 0) -> Tuple[GraphSnapshot, GraphSnapshot, BatchUpdate]:
    prev_graph = random_normalized_graph(n, m, seed)
    batch = random_batch(prev_graph, deletions, insertions, seed)
    return prev_graph, apply_batch(prev_graph, batch), batch


def example_snapshot_pair() -> Tuple[GraphSnapshot, GraphSnapshot, BatchUpdate]:
    prev_graph = add_self_loops(GraphSnapshot.from_edges(16, EXAMPLE_EDGES))
    batch = BatchUpdate.from_pairs(deletions=EXAMPLE_DELETIONS, insertions=EXAMPLE_INSERTIONS)
    return prev_graph, apply_batch(prev_graph, batch), batch
