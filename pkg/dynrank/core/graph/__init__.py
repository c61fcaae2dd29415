from dynrank.core.graph.convert import from_networkx, to_networkx
from dynrank.core.graph.generators import generate_random_graph
from dynrank.core.graph.io import GraphInputError, GraphParseError, load_edge_list, load_graph
from dynrank.core.graph.snapshot import (BatchUpdate, ContractViolationError, GraphSnapshot, add_self_loops,
                                         apply_batch)
