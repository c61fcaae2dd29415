import dataclasses
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Union

from dynrank.core.constants import DEFAULT_INSERT_RATIO, DEFAULT_REPETITIONS
from dynrank.core.engine.parameters import Approach, EngineConfig, RankMode
from dynrank.utilities.random import derive_seeds

BOTH_MODES = 'both'

# contract columns of the benchmark table, in output order
RECORD_COLUMNS = ('graph', 'approach', 'mode', 'fraction', 'insert_ratio', 'repetition', 'threads', 'seed',
                  'elapsed_s', 'preprocess_s', 'iterations', 'rank_updates', 'affected_final',
                  'affected_fraction', 'l1_error', 'converged')
EXTRA_COLUMNS = ('tau_f', 'speedup', 'error')


@dataclass
class ExperimentPlan:
    """Grid of benchmark cells.

    Every combination of graph, fraction, repetition, mode, thread count and
    approach is one cell. Repetition ``i`` uses the ``i``-th seed, either from
    ``seeds`` or split from ``seed``.

    :param graphs: graph sources, file paths or ``random:n=...,m=...`` specs
    :param approaches: strategies to run
    :param mode: ``sync``, ``async`` or ``both``
    :param fractions: batch sizes as fractions of the edge count
    :param insert_ratio: share of insertions in every batch
    :param repetitions: batches per fraction
    :param seed: base seed the repetition seeds are derived from
    :param seeds: explicit repetition seeds, overriding ``seed``
    :param threads: thread counts; ``None`` resolves the default
    :param config: engine parameters shared by all cells
    :param base: vertex id base of edge list files
    :param strict: whether batches must match the graph exactly
    :param check_invariants: whether to spot-check the skip and containment properties
    """
    graphs: Sequence[str]
    approaches: Sequence[Union[Approach, str]] = tuple(Approach)
    mode: str = RankMode.asynchronous.value
    fractions: Sequence[float] = (1e-4,)
    insert_ratio: float = DEFAULT_INSERT_RATIO
    repetitions: int = DEFAULT_REPETITIONS
    seed: int = 0
    seeds: Optional[Sequence[int]] = None
    threads: Sequence[Optional[int]] = (None,)
    config: EngineConfig = field(default_factory=EngineConfig)
    base: int = 0
    strict: bool = True
    check_invariants: bool = True

    def __post_init__(self):
        if isinstance(self.graphs, str):
            self.graphs = [self.graphs]
        if not self.graphs:
            raise ValueError('Experiment plan needs at least one graph')
        self.approaches = [Approach(approach) for approach in self.approaches]
        if not self.approaches:
            raise ValueError('Experiment plan needs at least one approach')
        if self.mode != BOTH_MODES:
            self.mode = RankMode(self.mode).value
        if not self.fractions:
            raise ValueError('Experiment plan needs at least one batch fraction')
        if self.repetitions < 1:
            raise ValueError(f'repetitions must be at least 1, got {self.repetitions}')
        if self.seeds is not None and len(self.seeds) != self.repetitions:
            raise ValueError(f'Got {len(self.seeds)} seeds for {self.repetitions} repetitions')
        if not self.threads:
            raise ValueError('Experiment plan needs at least one thread count')

    @property
    def modes(self) -> List[RankMode]:
        if self.mode == BOTH_MODES:
            return [RankMode.synchronous, RankMode.asynchronous]
        return [RankMode(self.mode)]

    @property
    def repetition_seeds(self) -> List[int]:
        if self.seeds is not None:
            return [int(seed) for seed in self.seeds]
        return derive_seeds(self.seed, self.repetitions)

    def engine_config(self, mode: RankMode, threads: Optional[int]) -> EngineConfig:
        return dataclasses.replace(self.config, mode=mode, threads=threads)

    def for_graph(self, graph: str) -> 'ExperimentPlan':
        """ The same plan restricted to one graph source """
        return dataclasses.replace(self, graphs=[graph])


@dataclass
class ExperimentRecord:
    """ One row of the benchmark table. Metric fields stay ``None`` when the cell failed. """
    graph: str
    approach: str
    mode: str
    fraction: float
    insert_ratio: float
    repetition: int
    threads: int
    seed: int
    elapsed_s: Optional[float] = None
    preprocess_s: Optional[float] = None
    iterations: Optional[int] = None
    rank_updates: Optional[int] = None
    affected_final: Optional[int] = None
    affected_fraction: Optional[float] = None
    l1_error: Optional[float] = None
    converged: Optional[bool] = None
    tau_f: Optional[float] = None
    speedup: Optional[float] = None
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None

    def to_dict(self) -> Dict[str, object]:
        return dataclasses.asdict(self)
