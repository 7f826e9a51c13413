import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import FrozenSet, Optional, Sequence, Tuple

import numpy as np

from ..errors import ConfigurationError

# Tolerance for probability vectors summing to one
PROB_TOL = 1e-12


class Decision(Enum):
    '''Per-sample action: keep the local inference or send the sample to the server'''
    ACCEPT = 0
    OFFLOAD = 1


class CostVariant(Enum):
    FIXED = 'fixed'
    BERNOULLI = 'bernoulli'
    DISCRETE = 'discrete'


def _check_unit(name: str, value: float) -> float:
    value = float(value)
    if not (0.0 <= value <= 1.0) or math.isnan(value):
        raise ConfigurationError(f'{name} must lie in [0, 1], got {value}.')
    return value


@dataclass(frozen=True)
class ConfidenceGrid:
    '''The finite ordered set of quantized confidence values; indices are the canonical handle'''
    values: Tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, 'values', values)
        if not values:
            raise ConfigurationError('Confidence grid must not be empty.')
        for v in values:
            if not (0.0 < v <= 1.0):
                raise ConfigurationError(f'Grid values must lie in (0, 1], got {v}.')
        if any(b < a for a, b in zip(values, values[1:])):
            raise ConfigurationError('Grid values must be sorted non-decreasing.')

    def __len__(self) -> int:
        return len(self.values)

    @classmethod
    def uniform(cls, k: int) -> 'ConfidenceGrid':
        '''K uniform bins on [0, 1] labelled by their midpoints'''
        if k < 1:
            raise ConfigurationError(f'Grid size must be >= 1, got {k}.')
        return cls(tuple((b + 0.5) / k for b in range(k)))


@dataclass(frozen=True)
class AccuracyProfile:
    '''f(phi_i): probability the local inference is correct, one entry per grid index'''
    f: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, 'f', tuple(_check_unit('Accuracy f', v) for v in self.f))

    def __len__(self) -> int:
        return len(self.f)

    @property
    def monotone(self) -> bool:
        return all(b >= a for a, b in zip(self.f, self.f[1:]))


@dataclass(frozen=True)
class CostModel:
    '''Distribution of the per-sample offloading cost Gamma_t'''
    variant: CostVariant
    gamma: Optional[float] = None
    support: Tuple[Tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.variant in (CostVariant.FIXED, CostVariant.BERNOULLI):
            if self.gamma is None:
                raise ConfigurationError(f'{self.variant.value} cost model needs gamma.')
            object.__setattr__(self, 'gamma', _check_unit('Offload cost gamma', self.gamma))
        else:
            support = tuple((_check_unit('Cost value', v), _check_unit('Cost probability', p))
                            for v, p in self.support)
            if not support:
                raise ConfigurationError('Discrete cost model needs a non-empty support.')
            total = sum(p for _, p in support)
            if abs(total - 1.0) > PROB_TOL:
                raise ConfigurationError(f'Discrete cost probabilities sum to {total}, not 1.')
            object.__setattr__(self, 'support', support)
            object.__setattr__(self, 'gamma', None)

    @classmethod
    def fixed(cls, gamma: float) -> 'CostModel':
        return cls(CostVariant.FIXED, gamma=gamma)

    @classmethod
    def bernoulli(cls, gamma: float) -> 'CostModel':
        return cls(CostVariant.BERNOULLI, gamma=gamma)

    @classmethod
    def discrete(cls, support: Sequence[Tuple[float, float]]) -> 'CostModel':
        return cls(CostVariant.DISCRETE, support=tuple((v, p) for v, p in support))

    @classmethod
    def bimodal(cls, gamma: float, spread: float = 0.05) -> 'CostModel':
        '''Two equiprobable values gamma +/- spread ({0.45, 0.55} at gamma = 0.5)'''
        return cls.discrete([(gamma - spread, 0.5), (gamma + spread, 0.5)])

    @property
    def is_fixed(self) -> bool:
        return self.variant is CostVariant.FIXED

    def mean(self) -> float:
        '''Expected offloading cost gamma = E[Gamma_t]'''
        if self.variant is CostVariant.DISCRETE:
            return math.fsum(v * p for v, p in self.support)
        return self.gamma

    def support_values(self) -> Tuple[float, ...]:
        if self.variant is CostVariant.FIXED:
            return (self.gamma,)
        if self.variant is CostVariant.BERNOULLI:
            return (0.0, 1.0)
        return tuple(v for v, _ in self.support)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        '''Draw i.i.d. costs'''
        if self.variant is CostVariant.FIXED:
            return np.full(size, self.gamma, dtype=np.float64)
        if self.variant is CostVariant.BERNOULLI:
            return (rng.random(size) < self.gamma).astype(np.float64)
        values = np.array([v for v, _ in self.support], dtype=np.float64)
        probs = np.array([p for _, p in self.support], dtype=np.float64)
        return values[rng.choice(len(values), size=size, p=probs / probs.sum())]


@dataclass(frozen=True)
class InstanceSpec:
    '''The simulated world: grid, accuracy profile, arrival weights and cost model'''
    grid: ConfidenceGrid
    profile: AccuracyProfile
    cost: CostModel
    weights: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if len(self.profile) != len(self.grid):
            raise ConfigurationError(
                f'Accuracy profile has {len(self.profile)} entries for a grid of {len(self.grid)}.')
        if self.weights is not None:
            weights = tuple(float(w) for w in self.weights)
            if len(weights) != len(self.grid):
                raise ConfigurationError(
                    f'Weights have {len(weights)} entries for a grid of {len(self.grid)}.')
            if any(w < 0 or math.isnan(w) for w in weights):
                raise ConfigurationError('Weights must be non-negative.')
            if abs(math.fsum(weights) - 1.0) > PROB_TOL:
                raise ConfigurationError(f'Weights sum to {math.fsum(weights)}, not 1.')
            object.__setattr__(self, 'weights', weights)

    @property
    def k(self) -> int:
        return len(self.grid)

    @property
    def gamma(self) -> float:
        return self.cost.mean()

    @cached_property
    def f_array(self) -> np.ndarray:
        f = np.array(self.profile.f, dtype=np.float64)
        f.flags.writeable = False
        return f

    @cached_property
    def weight_array(self) -> Optional[np.ndarray]:
        if self.weights is None:
            return None
        w = np.array(self.weights, dtype=np.float64)
        w.flags.writeable = False
        return w

    def with_cost(self, cost: CostModel) -> 'InstanceSpec':
        return InstanceSpec(self.grid, self.profile, cost, self.weights)

    def with_weights(self, weights: Optional[Sequence[float]]) -> 'InstanceSpec':
        return InstanceSpec(self.grid, self.profile, self.cost,
                            None if weights is None else tuple(weights))


@dataclass(frozen=True)
class GapVector:
    '''Delta_i = |1 - f(phi_i) - gamma| per grid index'''
    deltas: Tuple[float, ...]

    def __len__(self) -> int:
        return len(self.deltas)

    def __getitem__(self, i: int) -> float:
        return self.deltas[i]


@dataclass(frozen=True)
class Partition:
    '''Phi_H (accepting is strictly cheaper) and Phi_L (offloading is no more expensive)'''
    phi_H: FrozenSet[int]
    phi_L: FrozenSet[int]
    size: int

    @property
    def accept_mask(self) -> np.ndarray:
        mask = np.zeros(self.size, dtype=bool)
        mask[sorted(self.phi_H)] = True
        return mask

    def accepts(self, i: int) -> bool:
        return i in self.phi_H
