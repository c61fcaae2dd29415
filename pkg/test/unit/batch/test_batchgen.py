import numpy as np
import pytest

from dynrank.core.batch import BatchGenerationError, BatchSpec, generate_batch
from dynrank.core.batch.batchgen import batch_counts
from dynrank.core.graph import ContractViolationError, GraphSnapshot, add_self_loops, apply_batch
from test.unit.utils import random_normalized_graph


@pytest.fixture()
def graph():
    # 900 random edges and 100 self-loops
    return random_normalized_graph(100, 900, seed=1)


def test_zero_fraction_gives_empty_batch(graph):
    assert generate_batch(graph, BatchSpec(fraction=0, seed=3)).is_empty


def test_batch_counts(graph):
    assert graph.m == 1000

    batch = generate_batch(graph, BatchSpec(fraction=0.01, insert_ratio=0.8, seed=3))

    assert len(batch.insertions) == 8
    assert len(batch.deletions) == 2


@pytest.mark.parametrize('m, spec, expected', [
    (1000, BatchSpec(0.01, 1.0), (10, 0)),
    (1000, BatchSpec(0.01, 0.0), (0, 10)),
    (1000, BatchSpec(0.003, 0.8), (2, 1)),
    (1000, BatchSpec(1e-7, 0.8), (1, 0)),
    (1000, BatchSpec(1e-7, 0.2), (0, 1)),
    (0, BatchSpec(0.1, 0.8), (0, 0)),
])
def test_rounding_of_counts(m, spec, expected):
    assert batch_counts(m, spec) == expected


def test_same_spec_gives_same_batch(graph):
    spec = BatchSpec(fraction=0.05, insert_ratio=0.8, seed=12345)

    assert generate_batch(graph, spec) == generate_batch(graph, spec)
    assert generate_batch(graph, spec) != generate_batch(graph, BatchSpec(0.05, 0.8, seed=54321))


@pytest.mark.parametrize('insert_ratio', [0.0, 0.8, 1.0])
def test_generated_batch_matches_graph(graph, insert_ratio):
    batch = generate_batch(graph, BatchSpec(fraction=0.05, insert_ratio=insert_ratio, seed=7))

    assert graph.contains_edges(batch.deletions).all()
    assert not graph.contains_edges(batch.insertions).any()
    for edges in (batch.deletions, batch.insertions):
        assert not (edges[:, 0] == edges[:, 1]).any()
    updated = apply_batch(graph, batch, strict=True)
    assert updated.m == graph.m + len(batch.insertions) - len(batch.deletions)


def test_too_many_deletions_rejected():
    graph = add_self_loops(GraphSnapshot.from_edges(3, [(0, 1), (1, 2)]))

    with pytest.raises(ContractViolationError):
        generate_batch(graph, BatchSpec(fraction=1.0, insert_ratio=0.0))


def test_dense_graph_exhausts_insertion_budget():
    complete = [(u, v) for u in range(4) for v in range(4)]
    graph = GraphSnapshot.from_edges(4, complete)

    with pytest.raises(BatchGenerationError):
        generate_batch(graph, BatchSpec(fraction=0.5, insert_ratio=1.0))


def test_unnormalized_graph_rejected():
    with pytest.raises(ContractViolationError):
        generate_batch(GraphSnapshot.from_edges(3, [(0, 1)]), BatchSpec(fraction=0.5))


@pytest.mark.parametrize('params', [dict(fraction=-0.1), dict(fraction=1.5), dict(fraction=0.1, insert_ratio=1.2),
                                    dict(fraction=0.1, seed=-1)])
def test_invalid_spec_rejected(params):
    with pytest.raises(ValueError):
        BatchSpec(**params)


def test_insertions_are_spread_over_vertices(graph):
    batch = generate_batch(graph, BatchSpec(fraction=0.5, insert_ratio=1.0, seed=2))

    assert len(batch.insertions) == 500
    assert len(np.unique(batch.insertions[:, 0])) > 50


@pytest.mark.parametrize('insert_ratio', [0.0, 0.8, 1.0])
def test_single_vertex_graph_gives_empty_batch(insert_ratio):
    graph = add_self_loops(GraphSnapshot.from_edges(1))

    assert generate_batch(graph, BatchSpec(fraction=1e-4, insert_ratio=insert_ratio)).is_empty


def test_single_update_falls_back_to_the_kind_with_room():
    complete = add_self_loops(GraphSnapshot.from_edges(3, [(u, v) for u in range(3) for v in range(3) if u != v]))
    loops_only = add_self_loops(GraphSnapshot.from_edges(3))

    full = generate_batch(complete, BatchSpec(fraction=1e-4, insert_ratio=1.0))
    bare = generate_batch(loops_only, BatchSpec(fraction=1e-4, insert_ratio=0.0))

    assert (len(full.insertions), len(full.deletions)) == (0, 1)
    assert (len(bare.insertions), len(bare.deletions)) == (1, 0)


@pytest.mark.parametrize('insertable, deletable, expected', [(None, None, (1, 0)), (0, 5, (0, 1)), (0, 0, (0, 0))])
def test_single_update_respects_room(insertable, deletable, expected):
    assert batch_counts(1000, BatchSpec(1e-7, 0.8), insertable=insertable, deletable=deletable) == expected
