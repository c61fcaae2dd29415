import math
from typing import Optional, Sequence

import numpy as np

from dynrank.core.constants import REFERENCE_MAX_ITERATIONS, REFERENCE_TAU
from dynrank.core.engine import EngineConfig, RankMode, RunResult, StaticPageRank
from dynrank.core.engine.result import RankVector
from dynrank.core.graph import ContractViolationError, GraphSnapshot
from dynrank.core.log import default_log


def reference_ranks(graph: GraphSnapshot, threads: Optional[int] = None) -> RankVector:
    """ High-precision ranks the errors are measured against: a synchronous static run
    whose tolerance is below double precision, so it stops at the iteration cap
    (or earlier, once an iteration leaves the ranks exactly unchanged). """
    config = EngineConfig(tau=REFERENCE_TAU, tau_f=REFERENCE_TAU, max_iterations=REFERENCE_MAX_ITERATIONS,
                          mode=RankMode.synchronous, threads=threads)
    return StaticPageRank(config, cap_expected=True).run(graph).ranks


def l1_error(ranks: RankVector, reference: RankVector) -> float:
    ranks = np.asarray(ranks, dtype=np.float64)
    reference = np.asarray(reference, dtype=np.float64)
    if ranks.shape != reference.shape:
        raise ContractViolationError(f'Rank vectors differ in length: {len(ranks)} and {len(reference)}')
    return float(np.sum(np.abs(ranks - reference)))


def geometric_mean(values: Sequence[float]) -> float:
    """ ``exp(mean(log(values)))`` of positive values """
    values = np.asarray(list(values), dtype=np.float64)
    if values.size == 0:
        raise ContractViolationError('Geometric mean of an empty sequence is undefined')
    if (values <= 0).any() or not np.isfinite(values).all():
        raise ContractViolationError(f'Geometric mean needs positive finite values, got {values.tolist()}')
    return float(math.exp(np.mean(np.log(values))))


def check_skip_contract(result: RunResult, seed_ranks: RankVector) -> bool:
    """ Vertices a dynamic run never flagged must keep their seed ranks bit for bit.
    Violations are logged, or raised inside a test session. """
    if result.affected is None:
        return True
    untouched = result.affected == 0
    if np.array_equal(result.ranks[untouched], np.asarray(seed_ranks)[untouched]):
        return True
    changed = np.flatnonzero(untouched & (result.ranks != seed_ranks))
    default_log('check_skip_contract').log_or_raise(
        'error', ContractViolationError(f'{result.approach.value} changed ranks of {len(changed)} unflagged '
                                        f'vertices, e.g. {changed[:5].tolist()}'))
    return False


def check_containment(frontier: RunResult, reachable) -> bool:
    """ Every vertex flagged by the frontier run must be reachable from a batch source.

    Args:
        frontier: result of the frontier engine
        reachable: traversal result or flags of reachable vertices
    """
    reachable = reachable.affected if isinstance(reachable, RunResult) else reachable
    if frontier.affected is None or reachable is None:
        return True
    outside = np.flatnonzero((frontier.affected != 0) & (np.asarray(reachable) == 0))
    if outside.size == 0:
        return True
    default_log('check_containment').log_or_raise(
        'error', ContractViolationError(f'Frontier flagged {len(outside)} vertices unreachable from the batch, '
                                        f'e.g. {outside[:5].tolist()}'))
    return False
