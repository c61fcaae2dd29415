import networkx as nx
import numpy as np

from dynrank.core.graph.snapshot import GraphSnapshot


def to_networkx(graph: GraphSnapshot) -> nx.DiGraph:
    """ Converts the snapshot into a ``networkx.DiGraph`` with integer nodes ``0..n-1`` """
    nx_graph = nx.DiGraph()
    nx_graph.add_nodes_from(range(graph.n))
    nx_graph.add_edges_from(graph.edges().tolist())
    return nx_graph


def from_networkx(nx_graph: nx.DiGraph) -> GraphSnapshot:
    """ Builds a snapshot from a networkx graph.

    Nodes are relabelled to ``0..n-1`` in sorted order. Undirected graphs
    contribute both directions of every edge.
    """
    nodes = sorted(nx_graph.nodes)
    index = {node: i for i, node in enumerate(nodes)}
    pairs = [(index[u], index[v]) for u, v in nx_graph.edges]
    if not nx_graph.is_directed():
        pairs += [(v, u) for u, v in pairs]
    return GraphSnapshot.from_edges(len(nodes), np.asarray(pairs, dtype=np.int64).reshape(-1, 2))
