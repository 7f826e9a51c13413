import time
from typing import Sequence

import numpy as np
import pandas as pd

from ..config import BENCH_WARMUP, logger
from ..core.instance import synthetic_instance
from ..core.types import InstanceSpec
from ..environment.stream import ArrivalProcess, make_stream, realize_feedback
from ..errors import ConfigurationError
from ..policies.factory import make_policy
from ..policies.settings import PolicyConfig

BENCH_POLICIES = ('hi-lcb', 'hi-lcb-lite', 'hedge')


def bench_instance(k: int) -> InstanceSpec:
    '''Uniform arrivals over K bins, accuracy rising linearly from 0.5 to 1, fixed cost 0.5'''
    f = 0.5 + 0.5 * (np.arange(k) + 0.5) / k
    return synthetic_instance(f.tolist(), gamma=0.5)


def time_policy(config: PolicyConfig, k: int, T: int, warmup: int = BENCH_WARMUP, seed: int = 0) -> float:
    '''Mean wall time of one decide + feedback step, in nanoseconds, warmup rounds excluded'''
    if k < 1 or T < 1:
        raise ConfigurationError(f'Benchmark needs K >= 1 and T >= 1, got K={k}, T={T}.')
    warmup = min(warmup, T // 2)
    instance = bench_instance(k)
    rounds = list(make_stream(instance, ArrivalProcess.stochastic(), seed, T).rounds())
    policy = make_policy(config, instance, seed=seed, horizon=T)
    decide, update, observe = policy.decide, policy.update, policy.observe
    full_information = policy.full_information

    def play(batch):
        for rnd in batch:
            d = decide(rnd.phi_index)
            update(rnd.phi_index, realize_feedback(rnd, d), d)
            if full_information:
                observe(rnd)

    play(rounds[:warmup])
    start = time.perf_counter_ns()
    play(rounds[warmup:])
    elapsed = time.perf_counter_ns() - start
    return elapsed / (T - warmup)


def benchmark(k_values: Sequence[int], T: int, alpha: float, policies: Sequence[str] = BENCH_POLICIES,
              warmup: int = BENCH_WARMUP) -> pd.DataFrame:
    '''Rows K, policy, ns_per_decision'''
    rows = []
    for k in k_values:
        for name in policies:
            extra = {'alpha': alpha, 'cost_mode': 'fixed'} if name.startswith('hi-lcb') else {}
            ns = time_policy(PolicyConfig(policy=name, **extra), k, T, warmup)
            logger.info(f'K={k} {name}: {ns:.0f} ns/decision')
            rows.append({'K': k, 'policy': name, 'ns_per_decision': ns})
    return pd.DataFrame(rows, columns=['K', 'policy', 'ns_per_decision'])
