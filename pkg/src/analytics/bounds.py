'''Analytic regret bounds, the Bernoulli KL lower bound and the static-threshold oracle.

All logarithms are natural. Bounds are expectations; at finite T the lower
bound is informational only.
'''
import math
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Optional

import numpy as np
from scipy.special import rel_entr

from ..config import logger
from ..core.instance import gap_vector, partition_phi
from ..core.types import InstanceSpec
from ..errors import BoundUndefinedError

UPPER_BOUND_THEOREMS = ('1a', '1b', '1c', '1d', '2a', '2b', '2c', '2d')

# Threshold costs within this tolerance count as tied
ORACLE_TIE_TOL = 1e-12


class BoundConstants(NamedTuple):
    C1: float
    C2: float
    C3: Optional[float]
    C4: Optional[float]


@dataclass(frozen=True)
class ThresholdOracle:
    '''Expected per-round cost of every static threshold j (offload iff bin < j)'''
    best: int
    costs: np.ndarray

    @property
    def best_cost(self) -> float:
        return float(self.costs[self.best])


def _check_alpha(alpha: float) -> None:
    if not alpha > 0.5:
        raise BoundUndefinedError(f'Bounds need alpha > 0.5, got {alpha}.')


def _check_horizon(T: int) -> None:
    if T < 1:
        raise BoundUndefinedError(f'Bounds need T >= 1, got {T}.')


def _split(instance: InstanceSpec):
    part = partition_phi(instance)
    return sorted(part.phi_H), sorted(part.phi_L), gap_vector(instance).deltas


def _weight_ratio_min(w: np.ndarray, high: List[int], i: int, scale: np.ndarray) -> float:
    '''min over j in Phi_H with j <= i of w_i * scale_j / w_j; zero when bin i never arrives'''
    if w[i] == 0:
        return 0.0
    return min(w[i] * scale[j] / w[j] for j in high if j <= i and w[j] > 0)


def _accept_side(alpha: float, deltas, low: List[int]) -> float:
    '''Regret of accepting Phi_L bins; an empty Phi_L contributes nothing'''
    worst = max((deltas[j] for j in low), default=0.0)
    return worst * 2 * alpha * (len(low) + 1) / (2 * alpha - 1)


def bound_constants(instance: InstanceSpec, alpha: float) -> BoundConstants:
    '''The four additive constants; C3/C4 are None without arrival weights'''
    _check_alpha(alpha)
    high, low, deltas = _split(instance)
    worst_low = max((deltas[j] for j in low), default=0.0)
    ratio = 2 * alpha / (2 * alpha - 1)

    c1 = sum(4 * alpha * deltas[i] / (2 * alpha - 1) for i in high) + _accept_side(alpha, deltas, low)
    c2 = ratio * (sum(deltas[i] for i in high) + len(low) * worst_low)
    if instance.weight_array is None:
        return BoundConstants(c1, c2, None, None)

    w = instance.weight_array
    ones = np.ones(instance.k)
    d = np.asarray(deltas)
    c3 = (sum(4 * alpha * deltas[i] / (2 * alpha - 1) * _weight_ratio_min(w, high, i, ones) for i in high)
          + _accept_side(alpha, deltas, low))
    c4 = ratio * (sum(_weight_ratio_min(w, high, i, ones) * d[i] for i in high) + len(low) * worst_low)
    return BoundConstants(c1, c2, c3, c4)


def regret_upper_bound(instance: InstanceSpec, alpha: float, T: int, theorem: str) -> float:
    '''Evaluate one upper bound.

    1a/1b/2b: sum 16a/D ln T + C1; 1c/1d/2d: sum 4a/D ln T + C2;
    2a/2c: weighted minimum over lower Phi_H bins with 16a/4a, + C3/C4.
    A zero gap in Phi_H makes the bound infinite.
    '''
    if theorem not in UPPER_BOUND_THEOREMS:
        raise BoundUndefinedError(f'Unknown bound variant {theorem!r}.')
    _check_alpha(alpha)
    _check_horizon(T)
    high, _, deltas = _split(instance)
    log_t = math.log(T)
    constants = bound_constants(instance, alpha)
    coef = 16 * alpha if theorem in ('1a', '1b', '2a', '2b') else 4 * alpha

    if any(deltas[i] == 0 for i in high):
        logger.warning(f'Bound {theorem} is undefined: a Phi_H bin has zero gap')
        return math.inf

    if theorem in ('2a', '2c'):
        if instance.weight_array is None:
            raise BoundUndefinedError(f'Bound {theorem} needs arrival weights.')
        w = instance.weight_array
        d = np.asarray(deltas)
        inv_sq = np.zeros(instance.k)
        inv_sq[high] = 1.0 / d[high] ** 2
        leading = sum(coef * d[i] * _weight_ratio_min(w, high, i, inv_sq) for i in high)
        return leading * log_t + (constants.C3 if theorem == '2a' else constants.C4)

    leading = sum(coef / deltas[i] for i in high)
    return leading * log_t + (constants.C1 if coef == 16 * alpha else constants.C2)


def offload_count_bound(instance: InstanceSpec, alpha: float, T: int, i: int) -> float:
    '''Expected offloads of a Phi_H bin by T: 16a ln T / D^2 + 4a/(2a-1)'''
    _check_alpha(alpha)
    _check_horizon(T)
    high, _, deltas = _split(instance)
    if i not in high:
        raise BoundUndefinedError(f'Bin {i} is not in Phi_H.')
    if deltas[i] == 0:
        return math.inf
    return 16 * alpha * math.log(T) / deltas[i] ** 2 + 4 * alpha / (2 * alpha - 1)


def accept_count_bound(instance: InstanceSpec, alpha: float) -> float:
    '''Expected total accepts over Phi_L: (|Phi_L| + 1) 2a/(2a-1)'''
    _check_alpha(alpha)
    _, low, _ = _split(instance)
    return (len(low) + 1) * 2 * alpha / (2 * alpha - 1)


def kl_bernoulli(p: float, q: float) -> float:
    '''KL divergence between Bernoulli(p) and Bernoulli(q), with 0 ln 0 = 0'''
    for name, v in (('p', p), ('q', q)):
        if not 0.0 <= v <= 1.0:
            raise BoundUndefinedError(f'{name} must lie in [0, 1], got {v}.')
    return float(rel_entr(p, q) + rel_entr(1.0 - p, 1.0 - q))


def _check_singleton(f1: float, gamma: float, T: int) -> None:
    _check_horizon(T)
    if not gamma > 1.0 - f1:
        raise BoundUndefinedError(f'Lower bound needs gamma > 1 - f1, got gamma={gamma}, f1={f1}.')


def regret_lower_bound(f1: float, gamma: float, T: int) -> float:
    '''Delta ln T / D_B(gamma || 1 - f1) for the singleton instance, O(1) term taken as 0'''
    _check_singleton(f1, gamma, T)
    return abs(1.0 - f1 - gamma) * math.log(T) / kl_bernoulli(gamma, 1.0 - f1)


def offload_lower_bound(f1: float, gamma: float, T: int) -> float:
    '''ln T / D_B(gamma || 1 - f1): asymptotic minimum expected offloads'''
    _check_singleton(f1, gamma, T)
    return math.log(T) / kl_bernoulli(gamma, 1.0 - f1)


def static_threshold_oracle(instance: InstanceSpec, T_expected: Optional[int] = None) -> ThresholdOracle:
    '''Brute force over the K + 1 thresholds.

    cost(j) = sum_{i<j} w_i gamma + sum_{i>=j} w_i (1 - f_i). Among near-tied
    thresholds the smallest is moved up only across bins that partition_phi
    offloads, so zero-weight Phi_H bins stay accepted and 1 - f = gamma bins
    are offloaded.
    Costs are per round, so T_expected does not change the result.
    '''
    if instance.weight_array is None:
        raise BoundUndefinedError('The static threshold oracle needs arrival weights.')
    w = instance.weight_array
    accept_cost = w * (1.0 - instance.f_array)
    offload_part = instance.gamma * np.concatenate(([0.0], np.cumsum(w)))
    accept_part = np.concatenate((np.cumsum(accept_cost[::-1])[::-1], [0.0]))
    costs = offload_part + accept_part
    tied = costs <= costs.min() + ORACLE_TIE_TOL
    offloaded = ~partition_phi(instance).accept_mask
    best = int(np.argmax(tied))
    while best < instance.k and offloaded[best] and tied[best + 1]:
        best += 1
    return ThresholdOracle(best=best, costs=costs)


def all_bounds(instance: InstanceSpec, alpha: float, T: int) -> Dict[str, object]:
    '''Every bound that applies to the instance, keyed for JSON output'''
    _check_alpha(alpha)
    _check_horizon(T)
    constants = bound_constants(instance, alpha)
    high, low, deltas = _split(instance)
    out: Dict[str, object] = {
        'alpha': alpha,
        'T': T,
        'gamma': instance.gamma,
        'phi_H': high,
        'phi_L': low,
        'gaps': list(deltas),
        'C1': constants.C1,
        'C2': constants.C2,
        'C3': constants.C3,
        'C4': constants.C4,
    }
    for theorem in UPPER_BOUND_THEOREMS:
        if theorem in ('2a', '2c') and instance.weight_array is None:
            continue
        out[f'bound_{theorem}'] = regret_upper_bound(instance, alpha, T, theorem)
    out['offload_count_bounds'] = {str(i): offload_count_bound(instance, alpha, T, i) for i in high}
    out['accept_count_bound'] = accept_count_bound(instance, alpha)
    if instance.weight_array is not None:
        oracle = static_threshold_oracle(instance)
        out['oracle_threshold'] = oracle.best
        out['oracle_cost'] = oracle.best_cost
    if instance.k == 1:
        f1 = instance.profile.f[0]
        if instance.gamma > 1.0 - f1:
            out['lower_bound'] = regret_lower_bound(f1, instance.gamma, T)
            out['offload_lower_bound'] = offload_lower_bound(f1, instance.gamma, T)
    return out
