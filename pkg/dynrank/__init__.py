__version__ = '0.1.0'

from dynrank.core.batch import BatchSpec, generate_batch, load_batch, save_batch
from dynrank.core.engine import (Approach, EngineConfig, RankMode, RunResult, dynamic_frontier_pagerank,
                                 dynamic_traversal_pagerank, naive_dynamic_pagerank, pagerank, static_pagerank)
from dynrank.core.graph import BatchUpdate, GraphSnapshot, add_self_loops, apply_batch, load_edge_list, load_graph
