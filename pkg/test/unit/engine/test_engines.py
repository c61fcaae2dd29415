import numpy as np
import pytest

from dynrank.core.engine import (Approach, EmptyGraphError, EngineConfig, RankMode, dynamic_frontier_pagerank,
                                 dynamic_traversal_pagerank, naive_dynamic_pagerank, pagerank, static_pagerank)
from dynrank.core.graph import BatchUpdate, ContractViolationError, GraphSnapshot, add_self_loops, apply_batch
from test.unit.utils import dense_oracle, exact_config, example_snapshot_pair, flagged, random_snapshot_pair

DYNAMIC_ENGINES = [dynamic_traversal_pagerank, dynamic_frontier_pagerank]


def test_single_vertex():
    graph = add_self_loops(GraphSnapshot.from_edges(1))

    result = static_pagerank(graph, exact_config())

    assert result.ranks.tolist() == [1.0]
    assert result.converged
    assert result.affected_final == 1


def test_two_isolated_vertices():
    graph = add_self_loops(GraphSnapshot.from_edges(2))

    result = static_pagerank(graph, exact_config())

    assert result.ranks == pytest.approx([0.5, 0.5])


@pytest.mark.parametrize('mode', list(RankMode))
def test_directed_cycle_is_uniform(mode):
    graph = add_self_loops(GraphSnapshot.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]))

    result = static_pagerank(graph, exact_config(mode=mode))

    assert result.ranks == pytest.approx([0.25] * 4, abs=1e-12)


def test_static_matches_dense_oracle():
    graph = add_self_loops(GraphSnapshot.from_edges(5, [(0, 1), (0, 2), (1, 2), (2, 0), (3, 2), (4, 3), (2, 4)]))

    result = static_pagerank(graph, exact_config())

    assert np.abs(result.ranks - dense_oracle(graph)).sum() <= 1e-8
    assert result.rank_updates == result.iterations * graph.n


def test_empty_graph_rejected():
    with pytest.raises(EmptyGraphError):
        static_pagerank(GraphSnapshot.from_edges(0), exact_config())


def test_graph_must_be_normalized():
    with pytest.raises(ContractViolationError):
        static_pagerank(GraphSnapshot.from_edges(3, [(0, 1)]), exact_config())


def test_previous_ranks_length_checked():
    prev_graph, graph, batch = random_snapshot_pair(20, 60, deletions=1, insertions=1)

    with pytest.raises(ContractViolationError):
        naive_dynamic_pagerank(graph, np.full(19, 1 / 19), exact_config())
    with pytest.raises(ContractViolationError):
        dynamic_frontier_pagerank(prev_graph, graph, batch, np.full(21, 1 / 21), exact_config())


def test_naive_from_fixed_point_converges_at_once():
    _, graph, _ = random_snapshot_pair(30, 120, deletions=1, insertions=1)
    converged = static_pagerank(graph, exact_config(tau=1e-14)).ranks

    result = naive_dynamic_pagerank(graph, converged, exact_config())

    assert result.iterations == 1
    assert np.abs(result.ranks - converged).max() <= 1e-12


def test_naive_from_uniform_ranks_equals_static():
    _, graph, _ = random_snapshot_pair(30, 120, deletions=1, insertions=1)

    naive = naive_dynamic_pagerank(graph, np.full(graph.n, 1 / graph.n), exact_config())
    static = static_pagerank(graph, exact_config())

    assert np.array_equal(naive.ranks, static.ranks)
    assert naive.iterations == static.iterations


@pytest.mark.parametrize('engine', DYNAMIC_ENGINES)
@pytest.mark.parametrize('mode', list(RankMode))
def test_empty_batch_keeps_previous_ranks(engine, mode):
    prev_graph, _, _ = random_snapshot_pair(40, 150, deletions=0, insertions=0)
    prev_ranks = static_pagerank(prev_graph, exact_config()).ranks

    result = engine(prev_graph, prev_graph, BatchUpdate(), prev_ranks, exact_config(mode=mode))

    assert result.rank_updates == 0
    assert result.affected_final == 0
    assert result.converged
    assert result.iterations == 1
    assert np.array_equal(result.ranks, prev_ranks)
    assert result.ranks is not prev_ranks


@pytest.mark.parametrize('engine', DYNAMIC_ENGINES)
def test_unflagged_vertices_keep_previous_ranks(engine):
    # batch inside a sink component: 3 -> 4 -> 3 never reaches 0..2
    prev_graph = add_self_loops(GraphSnapshot.from_edges(6, [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 3)]))
    batch = BatchUpdate.from_pairs(insertions=[(4, 5)])
    graph = add_self_loops(GraphSnapshot.from_edges(6, [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 3), (4, 5)]))
    prev_ranks = static_pagerank(prev_graph, exact_config()).ranks

    result = engine(prev_graph, graph, batch, prev_ranks, exact_config())

    untouched = result.affected == 0
    assert untouched[:3].all()
    assert np.array_equal(result.ranks[untouched], prev_ranks[untouched])


@pytest.mark.parametrize('approach', list(Approach))
@pytest.mark.parametrize('seed', range(3))
def test_dynamic_engines_match_oracle_after_small_batch(approach, seed):
    prev_graph, graph, batch = random_snapshot_pair(25, 70, deletions=0, insertions=1, seed=seed)
    config = EngineConfig(mode=RankMode.synchronous, threads=1)
    prev_ranks = static_pagerank(prev_graph, exact_config()).ranks

    result = pagerank(approach, prev_graph, graph, batch, prev_ranks, config)

    assert np.abs(result.ranks - dense_oracle(graph)).sum() <= 2 * graph.n * config.tau


def test_worked_example_frontier_growth():
    prev_graph, graph, batch = example_snapshot_pair()
    prev_ranks = static_pagerank(prev_graph, exact_config()).ranks
    snapshots = []

    result = dynamic_frontier_pagerank(prev_graph, graph, batch, prev_ranks, exact_config(),
                                       iteration_callback=lambda info: snapshots.append(flagged(info.flags)))

    assert {1, 2, 3, 4, 8, 12, 5, 11, 14} <= snapshots[0]
    assert {4, 6, 15} <= snapshots[1]
    assert all(earlier <= later for earlier, later in zip(snapshots, snapshots[1:]))
    assert flagged(result.affected) == snapshots[-1]
    assert np.abs(result.ranks - dense_oracle(graph)).sum() <= 1e-6


def test_frontier_processes_flagged_set_captured_per_iteration():
    prev_graph, graph, batch = example_snapshot_pair()
    prev_ranks = static_pagerank(prev_graph, exact_config()).ranks
    processed = []

    dynamic_frontier_pagerank(prev_graph, graph, batch, prev_ranks, exact_config(),
                              iteration_callback=lambda info: processed.append(info.processed))

    # the first iteration covers exactly the batch sources 2, 4 and their out-neighbors 1, 3, 8, 12
    assert processed[0] == 6


@pytest.mark.parametrize('mode', list(RankMode))
def test_frontier_recomputes_source_without_affected_in_neighbors(mode):
    # 0 loses an out-edge; its only other in-neighbor 3 is never affected
    prev_graph = add_self_loops(GraphSnapshot.from_edges(4, [(3, 0), (0, 1), (0, 2)]))
    batch = BatchUpdate.from_pairs(deletions=[(0, 1)])
    graph = apply_batch(prev_graph, batch)
    prev_ranks = static_pagerank(prev_graph, exact_config()).ranks

    result = dynamic_frontier_pagerank(prev_graph, graph, batch, prev_ranks, exact_config(mode=mode))

    assert result.affected[0] == 1
    assert result.affected[3] == 0
    assert np.abs(result.ranks - dense_oracle(graph)).sum() <= 1e-6


def test_iteration_cap_leaves_run_unconverged():
    _, graph, _ = random_snapshot_pair(30, 120, deletions=0, insertions=0)

    result = static_pagerank(graph, exact_config(max_iterations=3))

    assert result.iterations == 3
    assert not result.converged
    assert result.rank_updates == 3 * graph.n


@pytest.mark.parametrize('mode', list(RankMode))
def test_teleport_floor(mode):
    prev_graph, graph, batch = random_snapshot_pair(50, 120, deletions=2, insertions=2)
    config = exact_config(mode=mode)
    prev_ranks = static_pagerank(prev_graph, config).ranks

    for approach in Approach:
        result = pagerank(approach, prev_graph, graph, batch, prev_ranks, config)
        assert (result.ranks >= (1 - config.alpha) / graph.n - 1e-15).all()


def test_synchronous_mass_conservation_every_iteration():
    _, graph, _ = random_snapshot_pair(80, 400, deletions=0, insertions=0, seed=2)
    sums = []

    static_pagerank(graph, exact_config(), iteration_callback=lambda info: sums.append(info.ranks.sum()))

    assert sums
    assert all(abs(total - 1) <= 1e-9 for total in sums)


@pytest.mark.parametrize('approach', list(Approach))
def test_synchronous_threads_do_not_change_results(approach):
    prev_graph, graph, batch = random_snapshot_pair(300, 1500, deletions=3, insertions=3, seed=4)
    single = exact_config(chunk_size=16)
    multi = exact_config(chunk_size=16, threads=2)
    prev_ranks = static_pagerank(prev_graph, single).ranks

    left = pagerank(approach, prev_graph, graph, batch, prev_ranks, single)
    right = pagerank(approach, prev_graph, graph, batch, prev_ranks, multi)

    assert np.array_equal(left.ranks, right.ranks)
    assert left.iterations == right.iterations


@pytest.mark.parametrize('approach', list(Approach))
def test_single_thread_runs_are_reproducible(approach):
    prev_graph, graph, batch = random_snapshot_pair(200, 900, deletions=2, insertions=2, seed=8)
    config = EngineConfig(threads=1, chunk_size=32)
    prev_ranks = static_pagerank(prev_graph, config).ranks

    first = pagerank(approach, prev_graph, graph, batch, prev_ranks, config)
    second = pagerank(approach, prev_graph, graph, batch, prev_ranks, config)

    assert np.array_equal(first.ranks, second.ranks)
    assert first.rank_updates == second.rank_updates


def test_dispatcher_accepts_names():
    prev_graph, graph, batch = random_snapshot_pair(20, 50, deletions=1, insertions=0)
    prev_ranks = static_pagerank(prev_graph, exact_config()).ranks

    result = pagerank('traversal', prev_graph, graph, batch, prev_ranks, exact_config())

    assert result.approach is Approach.traversal
    assert result.mode is RankMode.synchronous
    with pytest.raises(ValueError):
        pagerank('unknown', prev_graph, graph, batch, prev_ranks, exact_config())


def test_dynamic_engine_needs_previous_ranks():
    prev_graph, graph, batch = random_snapshot_pair(20, 50, deletions=1, insertions=0)

    with pytest.raises(ContractViolationError):
        pagerank(Approach.frontier, prev_graph, graph, batch, None, exact_config())
