from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

from dynrank.core.constants import (DEFAULT_ALPHA, DEFAULT_CHUNK_SIZE, DEFAULT_MAX_ITERATIONS, DEFAULT_TAU,
                                    FRONTIER_TOLERANCE_DIVISOR)
from dynrank.utilities.utilities import determine_threads


class RankMode(Enum):
    """Defines how rank values are stored during an iteration."""
    synchronous = 'sync'  # two rank vectors swapped per iteration
    asynchronous = 'async'  # single rank vector updated in place


class Approach(Enum):
    """PageRank update strategies."""
    static = 'static'
    naive = 'naive'
    traversal = 'traversal'
    frontier = 'frontier'

    @property
    def is_dynamic(self) -> bool:
        return self is not Approach.static


@dataclass
class EngineConfig:
    """Parameters of a rank computation.

    :param alpha: damping factor, in (0, 1)
    :param tau: iteration tolerance on the L-infinity norm of the per-iteration rank change
    :param tau_f: frontier tolerance; ``None`` means ``tau / 1e5``.

        A vertex whose rank changes by more than ``tau_f`` marks its out-neighbors as affected.

    :param max_iterations: iteration cap; hitting it leaves the run unconverged
    :param mode: rank storage mode, see :class:`RankMode`
    :param chunk_size: number of vertices per dynamically scheduled unit of work
    :param threads: number of worker threads; ``None`` resolves via ``DYNRANK_THREADS`` or the CPU count
    """

    alpha: float = DEFAULT_ALPHA
    tau: float = DEFAULT_TAU
    tau_f: Optional[float] = None
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    mode: Union[RankMode, str] = RankMode.asynchronous
    chunk_size: int = DEFAULT_CHUNK_SIZE
    threads: Optional[int] = field(default=None)

    def __post_init__(self):
        self.mode = RankMode(self.mode)
        self.threads = determine_threads(self.threads)
        if not 0 < self.alpha < 1:
            raise ValueError(f'Damping factor alpha must lie in (0, 1), got {self.alpha}')
        if not self.tau > 0:
            raise ValueError(f'Iteration tolerance tau must be positive, got {self.tau}')
        if self.tau_f is not None and not 0 < self.tau_f <= self.tau:
            raise ValueError(f'Frontier tolerance tau_f must lie in (0, tau={self.tau}], got {self.tau_f}')
        if self.max_iterations < 1:
            raise ValueError(f'max_iterations must be at least 1, got {self.max_iterations}')
        if self.chunk_size < 1:
            raise ValueError(f'chunk_size must be positive, got {self.chunk_size}')

    @property
    def frontier_tolerance(self) -> float:
        return self.tau_f if self.tau_f is not None else self.tau / FRONTIER_TOLERANCE_DIVISOR

    @property
    def is_synchronous(self) -> bool:
        return self.mode is RankMode.synchronous

    def describe(self) -> dict:
        """ Plain representation for reports """
        return dict(alpha=self.alpha, tau=self.tau, tau_f=self.frontier_tolerance,
                    max_iterations=self.max_iterations, mode=self.mode.value,
                    chunk_size=self.chunk_size, threads=self.threads)
