from concurrent.futures import Executor
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.stats import linregress
from tqdm import tqdm

from ..config import DEBUG_INVARIANTS, logger
from ..core.types import InstanceSpec
from ..environment.stream import ArrivalProcess, make_stream
from ..errors import BoundUndefinedError, ConfigurationError
from ..policies.factory import make_policy
from ..policies.settings import LCB_POLICIES, PolicyConfig
from .bounds import regret_upper_bound
from .episode import EpisodeResult, EpisodeSummary, run_episode, summarize_episode

CSV_COLUMNS = ['t', 'policy', 'mean_regret', 'stderr', 'offload_frac', 'accuracy',
               'bound_1a', 'bound_1c', 'bound_2a', 'bound_2c']


@dataclass(frozen=True)
class Aggregate:
    '''Per-checkpoint Monte-Carlo statistics over seeds, rows in seed order'''
    label: str
    checkpoints: Tuple[int, ...]
    seeds: Tuple[int, ...]
    regret: np.ndarray  # shape (seeds, checkpoints)
    offload_frac: np.ndarray
    accuracy: np.ndarray

    @property
    def n_seeds(self) -> int:
        return len(self.seeds)

    @property
    def mean_regret(self) -> np.ndarray:
        return self.regret.mean(axis=0)

    @property
    def stderr(self) -> np.ndarray:
        '''Standard error of the mean regret; NaN with a single seed'''
        if self.n_seeds < 2:
            return np.full(len(self.checkpoints), np.nan)
        return self.regret.std(axis=0, ddof=1) / np.sqrt(self.n_seeds)

    @property
    def mean_offload_frac(self) -> np.ndarray:
        return self.offload_frac.mean(axis=0)

    @property
    def mean_accuracy(self) -> np.ndarray:
        return self.accuracy.mean(axis=0)


class RegretFit(NamedTuple):
    slope: float
    intercept: float
    r_squared: float


def validate_checkpoints(checkpoints: Optional[Sequence[int]], T: int) -> Tuple[int, ...]:
    '''Checkpoints must be strictly increasing within [1, T]; defaults to (T,)'''
    if T < 1:
        raise ConfigurationError(f'Horizon T must be >= 1, got {T}.')
    if not checkpoints:
        return (T,)
    cps = tuple(int(c) for c in checkpoints)
    if cps[0] < 1 or cps[-1] > T or any(b <= a for a, b in zip(cps, cps[1:])):
        raise ConfigurationError(f'Checkpoints must be strictly increasing within [1, {T}], got {list(cps)}.')
    return cps


def _run_seed(job) -> EpisodeSummary:
    '''Worker entry point; module-level so process pools can pickle it'''
    instance, arrivals, config, seed, T, checkpoints, debug = job
    stream = make_stream(instance, arrivals, seed, T)
    policy = make_policy(config, instance, seed=seed, horizon=T)
    result = run_episode(policy, stream, instance, debug=debug)
    return summarize_episode(result, checkpoints)


def monte_carlo(instance: InstanceSpec, arrivals: ArrivalProcess, config: PolicyConfig,
                seeds: Sequence[int], T: int, checkpoints: Optional[Sequence[int]] = None,
                executor: Optional[Executor] = None, progress: bool = False,
                debug: bool = DEBUG_INVARIANTS) -> Aggregate:
    '''Paired Monte-Carlo estimate of regret, offload fraction and accuracy.

    Results are gathered in seed order whatever the executor, so the
    reduction is reproducible bit for bit.
    '''
    if not seeds:
        raise ConfigurationError('Monte-Carlo needs at least one seed.')
    cps = validate_checkpoints(checkpoints, T)
    jobs = [(instance, arrivals, config, int(s), T, cps, debug) for s in seeds]
    mapper = executor.map if executor is not None else map
    summaries: List[EpisodeSummary] = list(tqdm(
        mapper(_run_seed, jobs), total=len(jobs), desc=config.label, leave=False, disable=not progress))

    aggregate = Aggregate(
        label=config.label,
        checkpoints=cps,
        seeds=tuple(int(s) for s in seeds),
        regret=np.vstack([s.regret for s in summaries]),
        offload_frac=np.vstack([s.offload_frac for s in summaries]),
        accuracy=np.vstack([s.accuracy for s in summaries]),
    )
    logger.info(f'{config.label}: {len(seeds)} seeds, T={T}, mean regret {aggregate.mean_regret[-1]:.4g}')
    return aggregate


def summarize(results: Sequence[EpisodeResult]) -> pd.DataFrame:
    '''Offload fraction and accuracy per episode'''
    return pd.DataFrame([{
        'policy': r.policy,
        'seed': r.seed,
        'T': r.horizon,
        'offloads': int(r.offload.sum()),
        'offload_frac': r.offload_fraction,
        'accuracy': r.accuracy,
        'regret': float(r.regret[-1]),
    } for r in results])


def regret_fit(checkpoints: Sequence[int], mean_regret: Sequence[float]) -> RegretFit:
    '''Least-squares fit of mean regret against ln t'''
    fit = linregress(np.log(np.asarray(checkpoints, dtype=np.float64)), np.asarray(mean_regret))
    return RegretFit(float(fit.slope), float(fit.intercept), float(fit.rvalue ** 2))


def applicable_bounds(instance: InstanceSpec, config: PolicyConfig, arrivals: ArrivalProcess,
                      t: int) -> Dict[str, Optional[float]]:
    '''Bound columns for one output row; None where no bound covers the run'''
    out: Dict[str, Optional[float]] = {c: None for c in ('bound_1a', 'bound_1c', 'bound_2a', 'bound_2c')}
    if config.policy not in LCB_POLICIES:
        return out
    lite = config.policy == 'hi-lcb-lite'
    stochastic = arrivals.is_stochastic and instance.weights is not None
    if config.cost_mode == 'iid':
        wanted = {'bound_1a': '1b' if lite else '1a'}
        if stochastic:
            wanted['bound_2a'] = '2b' if lite else '2a'
    elif instance.cost.is_fixed:
        wanted = {'bound_1c': '1d' if lite else '1c'}
        if stochastic:
            wanted['bound_2c'] = '2d' if lite else '2c'
    else:
        wanted = {}
    for column, theorem in wanted.items():
        try:
            out[column] = regret_upper_bound(instance, config.alpha, t, theorem)
        except BoundUndefinedError as e:
            logger.debug(f'{column} skipped: {e}')
    return out


def aggregate_rows(aggregate: Aggregate, instance: InstanceSpec, config: PolicyConfig,
                   arrivals: ArrivalProcess, only_final: bool = False) -> pd.DataFrame:
    '''Output CSV rows for one aggregate, one per checkpoint (or just the last)'''
    rows = []
    stderr = aggregate.stderr
    mean_regret = aggregate.mean_regret
    offload_frac = aggregate.mean_offload_frac
    accuracy = aggregate.mean_accuracy
    positions = [len(aggregate.checkpoints) - 1] if only_final else range(len(aggregate.checkpoints))
    for n in positions:
        t = aggregate.checkpoints[n]
        rows.append({
            't': t,
            'policy': aggregate.label,
            'mean_regret': mean_regret[n],
            'stderr': None if np.isnan(stderr[n]) else stderr[n],
            'offload_frac': offload_frac[n],
            'accuracy': accuracy[n],
            **applicable_bounds(instance, config, arrivals, t),
        })
    return pd.DataFrame(rows, columns=CSV_COLUMNS)
