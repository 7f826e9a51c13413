import numpy as np
import pytest

from src.core import CostModel, synthetic_instance

# Reference instance: 8 uniform bins, gamma = 0.5 fixed
F_A = (0.30, 0.40, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95)
SKEWED_WEIGHTS = (0.30, 0.30, 0.30, 0.02, 0.02, 0.02, 0.02, 0.02)


@pytest.fixture
def instance_a():
    return synthetic_instance(F_A, gamma=0.5)


@pytest.fixture
def instance_a_skewed():
    return synthetic_instance(F_A, gamma=0.5, weights=SKEWED_WEIGHTS)


@pytest.fixture
def instance_a_discrete():
    return synthetic_instance(F_A, cost=CostModel.discrete([(0.45, 0.5), (0.55, 0.5)]))


@pytest.fixture
def three_bin_instance():
    '''Phi_H gaps {0.1, 0.4}, Phi_L gap {0.2} at gamma = 0.5'''
    return synthetic_instance((0.3, 0.6, 0.9), gamma=0.5)


def random_monotone_instance(rng: np.random.Generator, max_k: int = 16):
    k = int(rng.integers(1, max_k + 1))
    f = np.sort(rng.random(k))
    w = rng.random(k) + 1e-3
    w = w / w.sum()
    w[-1] = 1.0 - w[:-1].sum()
    return synthetic_instance(f.tolist(), gamma=float(rng.random()), weights=w.tolist())


@pytest.fixture
def random_instances():
    '''Factory for small random monotone instances'''
    def make(n: int, seed: int = 0, max_k: int = 16):
        rng = np.random.default_rng(seed)
        return [random_monotone_instance(rng, max_k) for _ in range(n)]
    return make
