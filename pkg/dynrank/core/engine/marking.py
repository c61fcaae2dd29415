import numpy as np

from dynrank.core.engine.kernels import gather_rows, mark_out_neighbors
from dynrank.core.engine.result import AffectedFlags
from dynrank.core.graph.snapshot import BatchUpdate, ContractViolationError, GraphSnapshot

FLAG_DTYPE = np.uint8


def new_flags(n: int) -> AffectedFlags:
    return np.zeros(n, dtype=FLAG_DTYPE)


def check_snapshot_pair(prev_graph: GraphSnapshot, graph: GraphSnapshot):
    if prev_graph.n != graph.n:
        raise ContractViolationError(f'Snapshots must share the vertex set, got n={prev_graph.n} and n={graph.n}')


def reachable_from(graph: GraphSnapshot, sources: np.ndarray) -> np.ndarray:
    """ Level-synchronous breadth-first search from all ``sources`` at once.

    Returns:
        boolean mask of vertices reachable from any source, sources included
    """
    visited = np.zeros(graph.n, dtype=bool)
    visited[sources] = True
    frontier = np.unique(sources)
    while frontier.size:
        positions, _, _ = gather_rows(graph.out_indptr, frontier)
        reached = np.unique(graph.out_indices[positions])
        frontier = reached[~visited[reached]]
        visited[frontier] = True
    return visited


def mark_reachable_into(flags: AffectedFlags, prev_graph: GraphSnapshot, graph: GraphSnapshot,
                        batch: BatchUpdate):
    sources = batch.sources()
    if sources.size == 0:
        return
    flags[reachable_from(prev_graph, sources) | reachable_from(graph, sources)] = 1


def mark_reachable(prev_graph: GraphSnapshot, graph: GraphSnapshot, batch: BatchUpdate) -> AffectedFlags:
    """ Flags every vertex reachable from the source of an updated edge,
    in the previous or in the current snapshot. """
    check_snapshot_pair(prev_graph, graph)
    flags = new_flags(graph.n)
    mark_reachable_into(flags, prev_graph, graph, batch)
    return flags


def mark_initial_affected_into(flags: AffectedFlags, prev_graph: GraphSnapshot, graph: GraphSnapshot,
                               batch: BatchUpdate):
    sources = batch.sources()
    # the source itself is reached only through its self-loop and stays unmarked
    mark_out_neighbors(flags, prev_graph, sources)
    mark_out_neighbors(flags, graph, sources)


def mark_initial_affected(prev_graph: GraphSnapshot, graph: GraphSnapshot, batch: BatchUpdate) -> AffectedFlags:
    """ Flags the out-neighbors, in both snapshots, of the source of every updated edge """
    check_snapshot_pair(prev_graph, graph)
    flags = new_flags(graph.n)
    mark_initial_affected_into(flags, prev_graph, graph, batch)
    return flags
