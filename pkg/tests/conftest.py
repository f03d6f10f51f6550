import numpy as np
import pytest


def random_affinity(rng, n, density=0.15, low=0.0):
    """Dense symmetric matrix, zero diagonal, a fraction of entries in (low, 1]."""
    W = np.zeros((n, n))
    iu = np.triu_indices(n, k=1)
    mask = rng.random(iu[0].size) < density
    vals = rng.uniform(low, 1.0, size=iu[0].size)
    vals[vals == 0] = 0.5
    W[iu[0][mask], iu[1][mask]] = vals[mask]
    return W + W.T


def strong_affinity(rng, n, density=0.2):
    """Like random_affinity but biased towards the PCE thresholds, with some exact 0.8/0.6 ties."""
    W = random_affinity(rng, n, density, low=0.4)
    iu = np.triu_indices(n, k=1)
    pick = rng.random(iu[0].size)
    W[iu[0][pick < 0.02], iu[1][pick < 0.02]] = 0.8
    W[iu[0][(pick >= 0.02) & (pick < 0.04)], iu[1][(pick >= 0.02) & (pick < 0.04)]] = 0.6
    upper = np.triu(W, 1)
    return upper + upper.T


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
