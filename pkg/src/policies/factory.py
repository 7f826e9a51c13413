from typing import Optional

from ..config import logger
from ..core.instance import partition_phi
from ..core.types import InstanceSpec
from ..environment.stream import POLICY, substream
from .base import OffloadPolicy
from .baselines import AlwaysAccept, AlwaysOffload, OptimalPolicy
from .hedge import HedgePolicy, auto_eta
from .lcb import LcbPolicy
from .settings import PolicyConfig


def make_policy(config: PolicyConfig, instance: InstanceSpec, seed: int = 0,
                horizon: Optional[int] = None) -> OffloadPolicy:
    '''Build a fresh policy for one episode.

    LCB policies never look at the horizon; Hedge uses horizon_hint, falling
    back to the episode horizon. Randomised policies draw from the episode's
    policy sub-stream.
    '''
    if config.policy in ('hi-lcb', 'hi-lcb-lite'):
        fixed_gamma = None
        if config.cost_mode == 'fixed':
            fixed_gamma = config.gamma if config.gamma is not None else instance.gamma
        return LcbPolicy(k=instance.k, alpha=config.alpha, lite=config.policy == 'hi-lcb-lite',
                         fixed_gamma=fixed_gamma, strict_force_offload=config.strict_force_offload)
    if config.policy == 'hedge':
        if config.eta == 'auto':
            eta = auto_eta(instance.k, config.horizon_hint or horizon)
            logger.debug(f'Hedge eta={eta:.6g} for K={instance.k}')
        else:
            eta = config.eta
        return HedgePolicy(k=instance.k, eta=eta, rng=substream(seed, POLICY))
    if config.policy == 'optimal':
        return OptimalPolicy(partition_phi(instance))
    if config.policy == 'always-offload':
        return AlwaysOffload()
    return AlwaysAccept()
