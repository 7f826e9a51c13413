from typing import Optional, Sequence

import numpy as np

from ..errors import ConfigurationError
from .types import (
    AccuracyProfile, ConfidenceGrid, CostModel, Decision, GapVector, InstanceSpec, Partition
)


def partition_phi(instance: InstanceSpec) -> Partition:
    '''Split grid indices into Phi_H (1 - f < gamma, accept) and Phi_L (offload).

    Ties 1 - f == gamma go to Phi_L, the same side the learning policies
    take when 1 - LCB >= LCB_gamma.
    '''
    gamma = instance.gamma
    phi_H = frozenset(i for i, f in enumerate(instance.profile.f) if 1.0 - f < gamma)
    phi_L = frozenset(range(instance.k)) - phi_H
    return Partition(phi_H=phi_H, phi_L=phi_L, size=instance.k)


def gap_vector(instance: InstanceSpec) -> GapVector:
    gamma = instance.gamma
    return GapVector(tuple(abs(1.0 - f - gamma) for f in instance.profile.f))


def expected_step_cost(instance: InstanceSpec, index: int, d: Decision) -> float:
    '''Expected per-round cost of taking decision d on a sample from bin index'''
    if not 0 <= index < instance.k:
        raise ConfigurationError(f'Grid index {index} out of range for K={instance.k}.')
    if d is Decision.ACCEPT:
        return 1.0 - instance.profile.f[index]
    return instance.gamma


def threshold_index(partition: Partition) -> Optional[int]:
    '''Number of leading Phi_L bins when Phi_L is a prefix, else None'''
    boundary = len(partition.phi_L)
    if partition.phi_L == frozenset(range(boundary)):
        return boundary
    return None


def expected_policy_cost(instance: InstanceSpec, offload_mask: np.ndarray) -> float:
    '''Expected per-round cost of a static rule that offloads exactly the masked bins'''
    if instance.weight_array is None:
        raise ConfigurationError('Expected policy cost needs arrival weights.')
    offload_mask = np.asarray(offload_mask, dtype=bool)
    per_bin = np.where(offload_mask, instance.gamma, 1.0 - instance.f_array)
    return float(np.dot(instance.weight_array, per_bin))


def synthetic_instance(f: Sequence[float], gamma: float = 0.5,
                       weights: Optional[Sequence[float]] = None,
                       cost: Optional[CostModel] = None) -> InstanceSpec:
    '''Instance on a uniform grid; synthetic profiles must be monotone.

    Weights default to uniform; cost defaults to a fixed, known gamma.
    '''
    k = len(f)
    profile = AccuracyProfile(tuple(f))
    if not profile.monotone:
        raise ConfigurationError('Synthetic accuracy profiles must be non-decreasing.')
    if weights is None:
        weights = [1.0 / k] * k
    return InstanceSpec(
        grid=ConfidenceGrid.uniform(k),
        profile=profile,
        cost=cost if cost is not None else CostModel.fixed(gamma),
        weights=tuple(weights),
    )
