import os
import re
from typing import List, Union

import numpy as np
import scipy.io

from dynrank.core.graph.generators import generate_random_graph
from dynrank.core.graph.snapshot import GraphSnapshot
from dynrank.core.log import default_log

PathType = Union[str, os.PathLike]

MATRIX_MARKET_HEADER = '%%MatrixMarket'
COMMENT_PREFIXES = ('#', '%')
RANDOM_SOURCE_PATTERN = re.compile(r'^random:(?P<params>[a-z]+=\d+(?:,[a-z]+=\d+)*)$')


class GraphParseError(ValueError):
    """ Raised on a malformed line of a graph file """

    def __init__(self, path: PathType, line_number: int, line: str, reason: str = 'expected "u v"'):
        self.path = str(path)
        self.line_number = line_number
        super().__init__(f'{self.path}:{line_number}: {reason}, got {line.strip()!r}')


class GraphInputError(ValueError):
    """ Raised when a graph file is well-formed but describes an invalid graph """
    pass


def _is_matrix_market(path: PathType) -> bool:
    with open(path, 'rt', encoding='utf-8', errors='replace') as file:
        return file.readline().startswith(MATRIX_MARKET_HEADER)


def load_edge_list(path: PathType, base: int = 0) -> GraphSnapshot:
    """ Reads a directed graph from a plain edge list or a MatrixMarket coordinate file.

    Edge list lines hold two whitespace-separated integers ``u v``; lines starting
    with ``#`` or ``%`` are comments. A MatrixMarket header switches to MatrixMarket
    parsing, which always uses 1-based indices.

    Args:
        path: file to read
        base: index of the first vertex in the file, 0 or 1

    Returns:
        GraphSnapshot: un-normalized snapshot; duplicate edges collapse to one
    """
    if base not in (0, 1):
        raise ValueError(f'Vertex id base must be 0 or 1, got {base}')
    if _is_matrix_market(path):
        return _load_matrix_market(path)

    sources: List[int] = []
    targets: List[int] = []
    with open(path, 'rt', encoding='utf-8') as file:
        for line_number, line in enumerate(file, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith(COMMENT_PREFIXES):
                continue
            parts = stripped.split()
            if len(parts) != 2:
                raise GraphParseError(path, line_number, line)
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphParseError(path, line_number, line, reason='vertex ids must be integers')
            if u < base or v < base:
                raise GraphInputError(f'{path}:{line_number}: vertex id below base {base} in {stripped!r}')
            sources.append(u - base)
            targets.append(v - base)

    edges = np.column_stack([np.asarray(sources, dtype=np.int64), np.asarray(targets, dtype=np.int64)])
    n = int(edges.max()) + 1 if len(edges) else 0
    graph = GraphSnapshot.from_edges(n, edges)
    default_log('load_edge_list').debug(f'Loaded {path}: n={graph.n}, m={graph.m}')
    return graph


def _load_matrix_market(path: PathType) -> GraphSnapshot:
    try:
        matrix = scipy.io.mmread(path)
    except (ValueError, IndexError, OSError) as ex:
        raise GraphParseError(path, 1, MATRIX_MARKET_HEADER, reason=f'invalid MatrixMarket file ({ex})')
    if not hasattr(matrix, 'tocoo'):
        raise GraphInputError(f'{path}: only MatrixMarket coordinate matrices describe graphs')
    # symmetric matrices come back with both triangles filled in
    matrix = matrix.tocoo()
    n = max(matrix.shape)
    edges = np.column_stack([matrix.row.astype(np.int64), matrix.col.astype(np.int64)])
    graph = GraphSnapshot.from_edges(n, edges)
    default_log('load_edge_list').debug(f'Loaded MatrixMarket {path}: n={graph.n}, m={graph.m}')
    return graph


def load_graph(source: str, base: int = 0) -> GraphSnapshot:
    """ Resolves a graph source: a file path or ``random:n=<int>,m=<int>[,seed=<int>]`` """
    match = RANDOM_SOURCE_PATTERN.match(source)
    if match:
        params = dict(item.split('=') for item in match.group('params').split(','))
        unknown = set(params) - {'n', 'm', 'seed'}
        if unknown or not {'n', 'm'} <= set(params):
            raise ValueError(f'Random graph source needs n and m (and optionally seed), got {source!r}')
        return generate_random_graph(int(params['n']), int(params['m']), seed=int(params.get('seed', 0)))
    return load_edge_list(source, base=base)
