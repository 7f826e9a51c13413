import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..core.types import Decision
from ..environment.stream import Feedback
from ..errors import ContractViolation
from .base import OffloadPolicy


@dataclass
class LcbState:
    '''Learner state shared by HI-LCB and HI-LCB-lite'''
    counts: List[int]  # O_i, offloads observed per bin
    fhat: List[float]  # running mean of revealed correctness per bin
    o_gamma: int = 0
    gamma_hat: float = 0.0
    t: int = 1  # current round, 1-based

    @classmethod
    def initial(cls, k: int) -> 'LcbState':
        return cls(counts=[0] * k, fhat=[0.0] * k)

    def clone(self) -> 'LcbState':
        return LcbState(list(self.counts), list(self.fhat), self.o_gamma, self.gamma_hat, self.t)


def _bonus(alpha: float, log_t: float, n: int) -> float:
    return math.sqrt(alpha * log_t / n)


def lcb_phi_lite(state: LcbState, i: int, alpha: float) -> float:
    '''f_hat(phi_i) - sqrt(alpha ln t / O_i); never clamped'''
    n = state.counts[i]
    if n == 0:
        raise ContractViolation(f'LCB of unobserved bin {i} is undefined; offload instead.')
    return state.fhat[i] - _bonus(alpha, math.log(state.t), n)


def lcb_phi(state: LcbState, i: int, alpha: float) -> Optional[float]:
    '''Max of the lite LCB over observed bins j <= i; None when none is observed.

    O(K) scan per call.
    '''
    log_t = math.log(state.t)
    counts, fhat = state.counts, state.fhat
    best = None
    for j in range(i + 1):
        n = counts[j]
        if n:
            v = fhat[j] - math.sqrt(alpha * log_t / n)
            if best is None or v > best:
                best = v
    return best


def lcb_phi_prefix_table(state: LcbState, alpha: float) -> np.ndarray:
    '''Every lcb_phi value at once via a running max; NaN where undefined'''
    counts = np.asarray(state.counts, dtype=np.float64)
    fhat = np.asarray(state.fhat, dtype=np.float64)
    log_t = math.log(state.t)
    lite = np.full(len(counts), -np.inf)
    seen = counts > 0
    lite[seen] = fhat[seen] - np.sqrt(alpha * log_t / counts[seen])
    table = np.maximum.accumulate(lite)
    return np.where(np.isneginf(table), np.nan, table)


def lcb_gamma(state: LcbState, alpha: float, fixed_gamma: Optional[float] = None) -> float:
    '''gamma_hat - sqrt(alpha ln t / O_gamma), or the known cost when it is fixed'''
    if fixed_gamma is not None:
        return fixed_gamma
    if state.o_gamma == 0:
        raise ContractViolation('Cost LCB is undefined before the first offload.')
    return state.gamma_hat - _bonus(alpha, math.log(state.t), state.o_gamma)


def decide(state: LcbState, i: int, alpha: float, lite: bool = False,
           fixed_gamma: Optional[float] = None, strict_force_offload: bool = False) -> Decision:
    '''Offload iff the bin must be explored or 1 - LCB_phi >= LCB_gamma'''
    if state.counts[i] == 0 and (lite or strict_force_offload):
        return Decision.OFFLOAD
    value = lcb_phi_lite(state, i, alpha) if lite else lcb_phi(state, i, alpha)
    if value is None or (fixed_gamma is None and state.o_gamma == 0):
        return Decision.OFFLOAD
    if 1.0 - value >= lcb_gamma(state, alpha, fixed_gamma):
        return Decision.OFFLOAD
    return Decision.ACCEPT


def update(state: LcbState, i: int, fb: Feedback, d: Decision) -> LcbState:
    '''Fold one round's feedback into the state; t advances every round'''
    if fb.revealed != (d is Decision.OFFLOAD):
        raise ContractViolation(f'Feedback revealed={fb.revealed} does not match decision {d.name}.')
    if fb.revealed:
        n = state.counts[i]
        state.fhat[i] = (n * state.fhat[i] + (1.0 if fb.correct else 0.0)) / (n + 1)
        state.gamma_hat = (state.o_gamma * state.gamma_hat + fb.cost) / (state.o_gamma + 1)
        state.counts[i] = n + 1
        state.o_gamma += 1
    state.t += 1
    return state


@dataclass
class LcbPolicy(OffloadPolicy):
    '''HI-LCB (prefix-max LCB) or HI-LCB-lite (per-bin LCB)'''
    k: int
    alpha: float
    lite: bool = False
    fixed_gamma: Optional[float] = None
    strict_force_offload: bool = False
    state: LcbState = field(init=False)

    def __post_init__(self):
        self.state = LcbState.initial(self.k)
        self.name = 'hi-lcb-lite' if self.lite else 'hi-lcb'

    def decide(self, index: int) -> Decision:
        return decide(self.state, index, self.alpha, self.lite,
                      self.fixed_gamma, self.strict_force_offload)

    def update(self, index: int, feedback: Feedback, decision: Decision) -> None:
        update(self.state, index, feedback, decision)

    def check_invariants(self) -> None:
        '''Counter conservation and, for HI-LCB, non-decreasing LCBs'''
        state = self.state
        if sum(state.counts) != state.o_gamma:
            raise ContractViolation(f'Offload counters diverged: sum O_i={sum(state.counts)}, '
                                    f'O_gamma={state.o_gamma}.')
        if self.lite:
            return
        values = [lcb_phi(state, i, self.alpha) for i in range(self.k)]
        defined = [v for v in values if v is not None]
        if any(b < a for a, b in zip(defined, defined[1:])):
            raise ContractViolation(f'HI-LCB lower confidence bounds decrease at t={state.t}.')
