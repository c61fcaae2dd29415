from collections import defaultdict
from typing import Dict, List, Tuple

import pytest

from dynrank.core.batch import BatchSpec, generate_batch
from dynrank.core.engine import Approach, EngineConfig, RankMode, pagerank, static_pagerank
from dynrank.core.graph import add_self_loops, apply_batch, load_graph
from dynrank.core.log import default_log
from dynrank.harness import ExperimentPlan, ExperimentRecord, iter_experiment, l1_error

# sparse enough that a frontier grown from a small batch stays local
GRAPH_SIZE = 30000
GRAPHS = [f'random:n={GRAPH_SIZE},m=60000,seed={seed}' for seed in range(5)]
FRACTIONS = [1e-4, 1e-3]
INSERT_RATIOS = {'insertions': 1.0, 'deletions': 0.0, 'mixed': 0.8}
# smaller chunks than the vertex count, so that asynchronous runs see fresh values
CONFIG = EngineConfig(chunk_size=256, threads=1)

CellKey = Tuple[str, float, float, int, str]


@pytest.fixture(scope='module')
def sweep_records() -> List[ExperimentRecord]:
    records = []
    for insert_ratio in INSERT_RATIOS.values():
        plan = ExperimentPlan(graphs=GRAPHS, approaches=list(Approach), mode='both', fractions=FRACTIONS,
                              insert_ratio=insert_ratio, repetitions=1, seed=17, threads=[1], config=CONFIG)
        records.extend(iter_experiment(plan))
    return records


def by_cell(records: List[ExperimentRecord]) -> Dict[CellKey, Dict[str, ExperimentRecord]]:
    cells = defaultdict(dict)
    for record in records:
        key = (record.graph, record.fraction, record.insert_ratio, record.repetition, record.mode)
        cells[key][record.approach] = record
    return cells


def test_sweep_has_no_failed_cells(sweep_records):
    assert len(sweep_records) == len(GRAPHS) * len(FRACTIONS) * len(INSERT_RATIOS) * 2 * len(Approach)
    assert not [record for record in sweep_records if record.failed]
    assert all(record.converged for record in sweep_records)


def test_frontier_is_as_accurate_as_static(sweep_records):
    cells = by_cell(sweep_records)
    relaxed, strict = 0, 0
    for records in cells.values():
        frontier, static = records['frontier'], records['static']
        strict += frontier.l1_error <= static.l1_error
        relaxed += frontier.l1_error <= static.l1_error + GRAPH_SIZE * CONFIG.tau
    default_log('accuracy').info(f'frontier at most as inaccurate as static in {strict}/{len(cells)} cells')

    assert relaxed >= 0.95 * len(cells)


def test_frontier_affects_no_more_than_traversal(sweep_records):
    for records in by_cell(sweep_records).values():
        assert records['frontier'].affected_fraction <= records['traversal'].affected_fraction
        assert records['frontier'].affected_final <= records['traversal'].affected_final


def test_frontier_does_less_work_than_naive_on_small_batches(sweep_records):
    for (_, fraction, *_), records in by_cell(sweep_records).items():
        if fraction <= 1e-4:
            assert records['frontier'].rank_updates < records['naive'].rank_updates


def test_asynchronous_mode_converges_no_slower(sweep_records):
    cells = by_cell(sweep_records)
    pairs = []
    for (graph, fraction, insert_ratio, repetition, mode), records in cells.items():
        if mode != RankMode.asynchronous.value:
            continue
        sync = cells[(graph, fraction, insert_ratio, repetition, RankMode.synchronous.value)]
        pairs.extend((records[name].iterations, sync[name].iterations) for name in records)

    no_slower = sum(async_iterations <= sync_iterations for async_iterations, sync_iterations in pairs)
    default_log('storage modes').info(f'asynchronous runs no slower in {no_slower}/{len(pairs)} cells')
    # in-place updates do not keep the rank sum, so on fast-mixing random graphs the
    # slow total-mass mode dominates and full recomputations can need more iterations
    assert no_slower >= 0.6 * len(pairs)


@pytest.mark.parametrize('insert_ratio', INSERT_RATIOS.values(), ids=INSERT_RATIOS.keys())
@pytest.mark.parametrize('fraction', FRACTIONS)
@pytest.mark.parametrize('graph_source', GRAPHS)
def test_storage_modes_agree(graph_source, fraction, insert_ratio):
    prev_graph = add_self_loops(load_graph(graph_source))
    batch = generate_batch(prev_graph, BatchSpec(fraction, insert_ratio, seed=5))
    graph = apply_batch(prev_graph, batch)

    ranks = {}
    for mode in RankMode:
        config = EngineConfig(mode=mode, chunk_size=CONFIG.chunk_size, threads=1)
        prev_ranks = static_pagerank(prev_graph, config).ranks
        for approach in Approach:
            ranks[approach, mode] = pagerank(approach, prev_graph, graph, batch, prev_ranks, config).ranks

    for approach in Approach:
        difference = l1_error(ranks[approach, RankMode.asynchronous], ranks[approach, RankMode.synchronous])
        assert difference <= 10 * graph.n * CONFIG.tau, approach.value
