from dynrank.core.engine.engines import (ENGINES, DynamicFrontierPageRank, DynamicTraversalPageRank, EmptyGraphError,
                                         NaiveDynamicPageRank, PageRankEngine, StaticPageRank,
                                         dynamic_frontier_pagerank, dynamic_traversal_pagerank,
                                         naive_dynamic_pagerank, pagerank, static_pagerank)
from dynrank.core.engine.kernels import pull_ranks, rank_of
from dynrank.core.engine.marking import mark_initial_affected, mark_reachable
from dynrank.core.engine.parameters import Approach, EngineConfig, RankMode
from dynrank.core.engine.result import IterationInfo, RunResult
