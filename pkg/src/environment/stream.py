from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np

from ..config import logger
from ..core.types import Decision, InstanceSpec, PROB_TOL
from ..errors import ContractViolation, StreamError

# RNG algorithm recorded in run metadata
RNG_ALGORITHM = 'PCG64'

# Sub-stream purposes; each (seed, purpose) pair owns an independent generator
ARRIVALS, CORRECTNESS, COSTS, POLICY = 0, 1, 2, 3

MAX_SEED = 2 ** 64


def substream(seed: int, purpose: int) -> np.random.Generator:
    '''Independent generator for one (seed, purpose) pair'''
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(purpose,))))


class ArrivalMode(Enum):
    STOCHASTIC = 'stochastic'
    ADVERSARIAL = 'adversarial'
    TRACE_REPLAY = 'trace-replay'
    TRACE_SAMPLE = 'trace-sample'


@dataclass(frozen=True)
class ArrivalProcess:
    '''How confidence bins arrive over time.

    STOCHASTIC draws i.i.d. bins from the weights (the instance's when none
    are given). ADVERSARIAL plays a fixed index sequence. TRACE_REPLAY plays
    trace rows in file order and TRACE_SAMPLE draws trace rows uniformly with
    replacement; both trace modes take correctness from the rows.
    '''
    mode: ArrivalMode
    weights: Optional[Tuple[float, ...]] = None
    sequence: Optional[Tuple[int, ...]] = None
    trace_correct: Optional[Tuple[bool, ...]] = None

    @classmethod
    def stochastic(cls, weights: Optional[Sequence[float]] = None) -> 'ArrivalProcess':
        return cls(ArrivalMode.STOCHASTIC, weights=None if weights is None else tuple(weights))

    @classmethod
    def adversarial(cls, sequence: Sequence[int]) -> 'ArrivalProcess':
        return cls(ArrivalMode.ADVERSARIAL, sequence=tuple(int(i) for i in sequence))

    @classmethod
    def trace_replay(cls, bins: Sequence[int], correct: Sequence[bool]) -> 'ArrivalProcess':
        return cls(ArrivalMode.TRACE_REPLAY, sequence=tuple(int(b) for b in bins),
                   trace_correct=tuple(bool(c) for c in correct))

    @classmethod
    def trace_sample(cls, bins: Sequence[int], correct: Sequence[bool]) -> 'ArrivalProcess':
        return cls(ArrivalMode.TRACE_SAMPLE, sequence=tuple(int(b) for b in bins),
                   trace_correct=tuple(bool(c) for c in correct))

    @property
    def is_stochastic(self) -> bool:
        return self.mode in (ArrivalMode.STOCHASTIC, ArrivalMode.TRACE_SAMPLE)


@dataclass(frozen=True)
class Round:
    t: int  # 1-based
    phi_index: int
    correct: bool
    cost: float


@dataclass(frozen=True)
class Feedback:
    '''What a policy learns after deciding; nothing unless it offloaded'''
    revealed: bool
    correct: Optional[bool] = None
    cost: Optional[float] = None

    def __post_init__(self):
        present = (self.correct is not None, self.cost is not None)
        if self.revealed and present != (True, True):
            raise ContractViolation('Revealed feedback must carry both correctness and cost.')
        if not self.revealed and present != (False, False):
            raise ContractViolation('Unrevealed feedback must not carry correctness or cost.')


HIDDEN = Feedback(revealed=False)


@dataclass(frozen=True)
class RoundStream:
    '''Pre-sampled randomness for one episode; every policy replays the same rounds'''
    seed: int
    horizon: int
    k: int
    phi_index: np.ndarray
    correct: np.ndarray
    cost: np.ndarray

    def __len__(self) -> int:
        return self.horizon

    def round(self, t: int) -> Round:
        '''Round at 1-based time t'''
        return Round(t, int(self.phi_index[t - 1]), bool(self.correct[t - 1]), float(self.cost[t - 1]))

    def rounds(self) -> Iterator[Round]:
        for n, (i, c, g) in enumerate(zip(self.phi_index.tolist(), self.correct.tolist(),
                                           self.cost.tolist())):
            yield Round(n + 1, i, c, g)


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def _arrival_indices(instance: InstanceSpec, arrivals: ArrivalProcess, seed: int,
                     T: int) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    '''Bin per round, plus recorded correctness for trace modes'''
    k = instance.k
    if arrivals.mode is ArrivalMode.STOCHASTIC:
        weights = arrivals.weights if arrivals.weights is not None else instance.weights
        if weights is None:
            raise StreamError('Stochastic arrivals need weights; the instance has none.')
        w = np.asarray(weights, dtype=np.float64)
        if len(w) != k or np.any(w < 0) or abs(w.sum() - 1.0) > PROB_TOL:
            raise StreamError('Stochastic arrival weights must be a distribution over the grid.')
        rng = substream(seed, ARRIVALS)
        return rng.choice(k, size=T, p=w / w.sum()).astype(np.int64), None

    seq = np.asarray(arrivals.sequence if arrivals.sequence is not None else (), dtype=np.int64)
    if seq.size and (seq.min() < 0 or seq.max() >= k):
        raise StreamError(f'Arrival sequence holds indices outside [0, {k}).')

    if arrivals.mode is ArrivalMode.ADVERSARIAL:
        if len(seq) < T:
            raise StreamError(f'Adversarial sequence has {len(seq)} rounds, horizon is {T}.')
        return seq[:T].copy(), None

    recorded = np.asarray(arrivals.trace_correct, dtype=bool)
    if len(recorded) != len(seq) or len(seq) == 0:
        raise StreamError('Trace arrivals need one correctness flag per row and at least one row.')
    if arrivals.mode is ArrivalMode.TRACE_REPLAY:
        if len(seq) < T:
            raise StreamError(f'Trace has {len(seq)} rows, horizon is {T}.')
        return seq[:T].copy(), recorded[:T].copy()
    rows = substream(seed, ARRIVALS).integers(0, len(seq), size=T)
    return seq[rows], recorded[rows]


def make_stream(instance: InstanceSpec, arrivals: ArrivalProcess, seed: int, T: int) -> RoundStream:
    '''Build the deterministic round stream for (instance, arrivals, seed, T)'''
    if isinstance(T, bool) or not isinstance(T, (int, np.integer)) or T < 1:
        raise StreamError(f'Horizon T must be an integer >= 1, got {T!r}.')
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or not 0 <= seed < MAX_SEED:
        raise StreamError(f'Seed must be an integer in [0, 2^64), got {seed!r}.')
    seed, T = int(seed), int(T)

    phi_index, recorded = _arrival_indices(instance, arrivals, seed, T)

    # Correctness uniforms are drawn even for trace modes so sub-streams stay aligned
    u = substream(seed, CORRECTNESS).random(T)
    correct = recorded if recorded is not None else u < instance.f_array[phi_index]

    cost = instance.cost.sample(substream(seed, COSTS), T)
    logger.debug(f'Built {arrivals.mode.value} stream: seed={seed}, T={T}, K={instance.k}')
    return RoundStream(seed=seed, horizon=T, k=instance.k,
                       phi_index=_readonly(phi_index), correct=_readonly(np.asarray(correct, dtype=bool)),
                       cost=_readonly(cost))


def realize_feedback(round: Round, d: Decision) -> Feedback:
    '''Correctness and cost are revealed only when the sample is offloaded'''
    if d is Decision.OFFLOAD:
        return Feedback(revealed=True, correct=round.correct, cost=round.cost)
    return HIDDEN


def realized_loss(round: Round, d: Decision) -> float:
    '''Offload pays the round's cost; accept pays 1 when the local inference is wrong'''
    if d is Decision.OFFLOAD:
        return round.cost
    return 0.0 if round.correct else 1.0


def load_adversarial_sequence(path: str) -> Tuple[int, ...]:
    '''Read a newline-separated file of 0-based grid indices'''
    try:
        values = np.loadtxt(path, dtype=np.int64, ndmin=1, comments='#')
    except (OSError, ValueError) as e:
        raise StreamError(f'Cannot read arrival sequence {path}: {e}')
    if values.size and values.min() < 0:
        raise StreamError(f'Arrival sequence {path} holds negative indices.')
    logger.info(f'Loaded {values.size} arrivals from {path}')
    return tuple(values.tolist())
