from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from dynrank.core.engine.parameters import Approach, RankMode

RankVector = np.ndarray  # float64 per vertex
AffectedFlags = np.ndarray  # uint8 per vertex, 0 = untouched, 1 = affected


@dataclass
class RunResult:
    """Outcome of one engine run.

    ``rank_updates`` counts vertex-rank computations over all iterations;
    ``affected`` holds the final flags of the traversal and frontier engines
    and is ``None`` for engines that process every vertex.
    """
    ranks: RankVector
    iterations: int
    rank_updates: int
    affected_final: int
    elapsed: float
    converged: bool
    approach: Approach
    mode: RankMode
    affected: Optional[AffectedFlags] = None

    @property
    def affected_fraction(self) -> float:
        n = len(self.ranks)
        return self.affected_final / n if n else 0.0


@dataclass(frozen=True)
class IterationInfo:
    """ State handed to iteration callbacks after each iteration. Arrays are live views. """
    iteration: int
    ranks: RankVector
    flags: Optional[AffectedFlags]
    delta: float
    processed: int


IterationCallback = Callable[[IterationInfo], None]
