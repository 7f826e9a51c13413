from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from ..config import DEBUG_INVARIANTS, logger
from ..core.instance import partition_phi
from ..core.types import Decision, InstanceSpec
from ..environment.stream import RoundStream, realize_feedback
from ..errors import StreamError
from ..policies.base import OffloadPolicy


@dataclass(frozen=True)
class EpisodeResult:
    '''One seeded run of a policy, paired with the benchmark on the same rounds'''
    policy: str
    seed: int
    k: int
    phi_index: np.ndarray
    correct: np.ndarray
    offload: np.ndarray  # policy decision per round, True = offload
    losses: np.ndarray
    opt_offload: np.ndarray
    opt_losses: np.ndarray

    @property
    def horizon(self) -> int:
        return len(self.offload)

    @property
    def cum_loss(self) -> np.ndarray:
        return np.cumsum(self.losses)

    @property
    def opt_cum_loss(self) -> np.ndarray:
        return np.cumsum(self.opt_losses)

    @property
    def regret(self) -> np.ndarray:
        '''r(t) = sum_{n<=t} (L_n - L*_n)'''
        return self.cum_loss - self.opt_cum_loss

    @property
    def offloads_per_bin(self) -> np.ndarray:
        return np.bincount(self.phi_index[self.offload], minlength=self.k)

    @property
    def accepts_per_bin(self) -> np.ndarray:
        return np.bincount(self.phi_index[~self.offload], minlength=self.k)

    @property
    def cum_offloads(self) -> np.ndarray:
        return np.cumsum(self.offload)

    @property
    def cum_accepted_correct(self) -> np.ndarray:
        return np.cumsum(~self.offload & self.correct)

    @property
    def offload_fraction(self) -> float:
        return float(self.offload.mean())

    @property
    def accuracy(self) -> float:
        '''Fraction classified correctly; the remote model is always right'''
        return float((self.offload | self.correct).mean())


@dataclass(frozen=True)
class EpisodeSummary:
    '''Checkpoint view of an EpisodeResult, small enough to ship between processes'''
    policy: str
    seed: int
    checkpoints: Tuple[int, ...]
    regret: np.ndarray
    offload_frac: np.ndarray
    accuracy: np.ndarray
    offloads_per_bin: np.ndarray
    accepts_per_bin: np.ndarray


def realized_losses(stream: RoundStream, offload: np.ndarray) -> np.ndarray:
    '''Array form of realized_loss: the cost when offloaded, the 0/1 error when accepted'''
    return np.where(offload, stream.cost, np.where(stream.correct, 0.0, 1.0))


def run_episode(policy: OffloadPolicy, stream: RoundStream, instance: InstanceSpec,
                debug: bool = DEBUG_INVARIANTS) -> EpisodeResult:
    '''Play the policy on the stream; the policy only learns what its decisions reveal'''
    if stream.k != instance.k:
        raise StreamError(f'Stream grid has {stream.k} bins, instance has {instance.k}.')

    offload = np.zeros(stream.horizon, dtype=bool)
    decide, update, observe = policy.decide, policy.update, policy.observe
    full_information = policy.full_information
    for rnd in stream.rounds():
        d = decide(rnd.phi_index)
        if d is Decision.OFFLOAD:
            offload[rnd.t - 1] = True
        update(rnd.phi_index, realize_feedback(rnd, d), d)
        if full_information:
            observe(rnd)
        if debug:
            policy.check_invariants()

    opt_offload = ~partition_phi(instance).accept_mask[stream.phi_index]
    logger.debug(f'Episode done: policy={policy.name}, seed={stream.seed}, offloads={int(offload.sum())}')
    return EpisodeResult(
        policy=policy.name, seed=stream.seed, k=stream.k,
        phi_index=stream.phi_index, correct=stream.correct,
        offload=offload, losses=realized_losses(stream, offload),
        opt_offload=opt_offload, opt_losses=realized_losses(stream, opt_offload),
    )


def summarize_episode(result: EpisodeResult, checkpoints: Sequence[int]) -> EpisodeSummary:
    idx = np.asarray(checkpoints, dtype=np.int64) - 1
    t = idx + 1.0
    cum_offloads = result.cum_offloads
    return EpisodeSummary(
        policy=result.policy, seed=result.seed, checkpoints=tuple(int(c) for c in checkpoints),
        regret=result.regret[idx],
        offload_frac=cum_offloads[idx] / t,
        accuracy=(result.cum_accepted_correct[idx] + cum_offloads[idx]) / t,
        offloads_per_bin=result.offloads_per_bin,
        accepts_per_bin=result.accepts_per_bin,
    )
