import numpy as np
import pytest

from dynrank.core.graph import BatchUpdate, ContractViolationError, GraphSnapshot, add_self_loops, apply_batch
from test.unit.utils import random_normalized_graph


@pytest.fixture()
def path_graph():
    return GraphSnapshot.from_edges(3, [(0, 1), (1, 2)])


def test_adjacency_in_both_directions():
    graph = GraphSnapshot.from_edges(4, [(0, 1), (0, 2), (3, 1), (2, 1)])

    assert graph.n == 4
    assert graph.m == 4
    assert graph.out_adj(0).tolist() == [1, 2]
    assert graph.in_adj(1).tolist() == [0, 2, 3]
    assert graph.in_adj(0).tolist() == []
    assert graph.out_degree.tolist() == [2, 0, 1, 1]
    assert graph.has_edge(3, 1)
    assert not graph.has_edge(1, 3)


def test_duplicate_edges_collapse():
    graph = GraphSnapshot.from_edges(2, [(0, 1), (0, 1), (1, 0)])

    assert graph.m == 2
    assert graph.edges().tolist() == [[0, 1], [1, 0]]


@pytest.mark.parametrize('edges', [[(0, 3)], [(-1, 0)]])
def test_edges_outside_vertex_range_rejected(edges):
    with pytest.raises(ContractViolationError):
        GraphSnapshot.from_edges(3, edges)


def test_snapshot_arrays_are_read_only(path_graph):
    with pytest.raises(ValueError):
        path_graph.out_indices[0] = 2


def test_add_self_loops(path_graph):
    normalized = add_self_loops(path_graph)

    assert not path_graph.is_normalized
    assert normalized.is_normalized
    assert normalized.m == 5
    assert normalized.average_degree == pytest.approx(5 / 3)
    assert all(normalized.has_edge(v, v) for v in range(3))
    assert add_self_loops(normalized) is normalized


def test_structural_equality():
    left = GraphSnapshot.from_edges(3, [(0, 1), (1, 2)])
    right = GraphSnapshot.from_edges(3, [(1, 2), (0, 1), (0, 1)])

    assert left == right
    assert left != GraphSnapshot.from_edges(4, [(0, 1), (1, 2)])


def test_apply_batch_builds_new_snapshot(path_graph):
    graph = add_self_loops(path_graph)
    batch = BatchUpdate.from_pairs(deletions=[(1, 2)], insertions=[(2, 0)])

    updated = apply_batch(graph, batch)

    assert updated.is_normalized
    assert not updated.has_edge(1, 2)
    assert updated.has_edge(2, 0)
    assert updated.m == graph.m
    # the previous snapshot is untouched
    assert graph.has_edge(1, 2)
    assert not graph.has_edge(2, 0)


@pytest.mark.parametrize('deletions, insertions', [([(0, 2)], []), ([], [(0, 1)])])
def test_strict_apply_batch_rejects_mismatches(path_graph, deletions, insertions):
    batch = BatchUpdate.from_pairs(deletions=deletions, insertions=insertions)

    with pytest.raises(ContractViolationError):
        apply_batch(add_self_loops(path_graph), batch)


def test_lenient_apply_batch_skips_mismatches(path_graph):
    graph = add_self_loops(path_graph)
    batch = BatchUpdate.from_pairs(deletions=[(0, 2), (1, 2)], insertions=[(0, 1), (2, 1)])

    updated = apply_batch(graph, batch, strict=False)

    assert not updated.has_edge(1, 2)
    assert updated.has_edge(2, 1)
    assert updated.has_edge(0, 1)
    assert updated.m == graph.m


@pytest.mark.parametrize('strict', [True, False])
def test_batch_outside_vertex_range_always_rejected(path_graph, strict):
    batch = BatchUpdate.from_pairs(insertions=[(0, 7)])

    with pytest.raises(ContractViolationError):
        apply_batch(add_self_loops(path_graph), batch, strict=strict)


def test_batch_rejects_self_loop_deletion():
    with pytest.raises(ContractViolationError):
        BatchUpdate.from_pairs(deletions=[(1, 1)])


def test_batch_rejects_overlapping_updates():
    with pytest.raises(ContractViolationError):
        BatchUpdate.from_pairs(deletions=[(0, 1)], insertions=[(0, 1)])


def test_batch_is_canonical():
    batch = BatchUpdate.from_pairs(deletions=[(3, 1), (0, 2), (3, 1)], insertions=[(5, 4)])

    assert batch.deletions.tolist() == [[0, 2], [3, 1]]
    assert batch.size == 3
    assert not batch.is_empty
    assert batch.sources().tolist() == [0, 3, 5]
    assert BatchUpdate().is_empty
    assert BatchUpdate().sources().tolist() == []


def test_inverse_batch_restores_graph():
    graph = random_normalized_graph(30, 120, seed=3)
    deleted = [tuple(edge) for edge in graph.edges().tolist() if edge[0] != edge[1]][:5]
    inserted = [(u, v) for u in range(30) for v in range(30) if u != v and not graph.has_edge(u, v)][:5]
    batch = BatchUpdate.from_pairs(deletions=deleted, insertions=inserted)

    updated = apply_batch(graph, batch)

    assert updated != graph
    assert apply_batch(updated, batch.inverse()) == graph


def test_contains_edges():
    graph = GraphSnapshot.from_edges(3, [(0, 1), (2, 2)])
    queries = np.array([[0, 1], [1, 0], [2, 2], [2, 1]])

    assert graph.contains_edges(queries).tolist() == [True, False, True, False]


def test_to_scipy_matches_edges():
    graph = random_normalized_graph(20, 60, seed=1)
    matrix = graph.to_scipy()

    assert matrix.shape == (20, 20)
    assert matrix.nnz == graph.m
    rows, cols = matrix.nonzero()
    assert sorted(zip(rows.tolist(), cols.tolist())) == [tuple(edge) for edge in graph.edges().tolist()]
