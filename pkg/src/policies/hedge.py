import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import softmax

from ..core.types import Decision
from ..environment.stream import Round
from ..errors import ConfigurationError
from .base import OffloadPolicy


def auto_eta(k: int, horizon: Optional[int]) -> float:
    '''Standard Hedge rate sqrt(8 ln N / T) for N = K + 1 threshold experts'''
    if horizon is None:
        raise ConfigurationError('eta="auto" needs a horizon hint.')
    return math.sqrt(8.0 * math.log(k + 1) / horizon)


@dataclass
class HedgeState:
    '''Exponential weights over K + 1 threshold experts; expert j offloads iff bin < j.

    Weights are kept in the log domain and normalised with a softmax.
    '''
    k: int
    eta: float
    log_weights: np.ndarray = field(default=None)
    cumulative_losses: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.eta < 0:
            raise ConfigurationError(f'Hedge learning rate must be >= 0, got {self.eta}.')
        n = self.k + 1
        if self.log_weights is None:
            self.log_weights = np.zeros(n)
        if self.cumulative_losses is None:
            self.cumulative_losses = np.zeros(n)
        self.experts = np.arange(n)
        self._refresh()

    def _refresh(self) -> None:
        self.weights = softmax(self.log_weights)
        self._cdf = np.cumsum(self.weights)

    @classmethod
    def with_weights(cls, k: int, eta: float, weights) -> 'HedgeState':
        '''State starting from given (normalisable, possibly zero) weights'''
        with np.errstate(divide='ignore'):
            log_w = np.log(np.asarray(weights, dtype=np.float64))
        return cls(k, eta, log_weights=log_w)

    def clone(self) -> 'HedgeState':
        return HedgeState(self.k, self.eta, self.log_weights.copy(), self.cumulative_losses.copy())


def hedge_decide(state: HedgeState, i: int, rng: np.random.Generator) -> Decision:
    '''Sample an expert in proportion to its weight and follow its threshold'''
    j = int(np.searchsorted(state._cdf, rng.random(), side='right'))
    j = min(j, state.k)
    return Decision.OFFLOAD if i < j else Decision.ACCEPT


def hedge_update(state: HedgeState, round: Round) -> HedgeState:
    '''Full-information multiplicative update with every expert's loss on this round'''
    losses = np.where(state.experts > round.phi_index, round.cost, 0.0 if round.correct else 1.0)
    state.cumulative_losses += losses
    state.log_weights -= state.eta * losses
    state._refresh()
    return state


@dataclass
class HedgePolicy(OffloadPolicy):
    '''Hedge over static thresholds; sees costs and correctness every round'''
    k: int
    eta: float
    rng: np.random.Generator
    state: HedgeState = field(init=False)

    full_information = True
    deterministic = False

    def __post_init__(self):
        self.state = HedgeState(self.k, self.eta)
        self.name = 'hedge'

    def decide(self, index: int) -> Decision:
        return hedge_decide(self.state, index, self.rng)

    def observe(self, round: Round) -> None:
        hedge_update(self.state, round)
