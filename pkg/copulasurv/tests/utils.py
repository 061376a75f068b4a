import os
import unittest
from functools import lru_cache

import numpy as np

from copulasurv.data import Dataset
from copulasurv.simulation import SimulationConfig, generate_dataset

slow = unittest.skipUnless(os.environ.get('COPULASURV_SLOW_TESTS') == '1',
                           'set COPULASURV_SLOW_TESTS=1 to run replication acceptance tests')


@lru_cache(maxsize=16)
def simulated(family, theta, n_clusters=100, seed=2024, censoring=None, size_min=2, size_max=50):
    cfg = SimulationConfig(family, theta, n_clusters=n_clusters, size_min=size_min, size_max=size_max,
                           censoring=censoring, seed=seed)
    return generate_dataset(cfg)


def independent_weibull(n, lam=0.0316, rho=1.5, beta=1.0, cluster_size=1, seed=11, censor_lambda=None):
    """
    Independent Weibull proportional hazards sample with one Bernoulli covariate
    """
    rng = np.random.default_rng(seed)
    z = (rng.random(n) < 0.5).astype(float)
    times = (rng.standard_exponential(n) / (lam * np.exp(beta * z))) ** (1.0 / rho)
    status = np.ones(n, dtype=int)
    if censor_lambda is not None:
        censor = (rng.standard_exponential(n) / censor_lambda) ** (1.0 / rho)
        status = (times <= censor).astype(int)
        times = np.minimum(times, censor)
    ids = ['%05d' % (i // cluster_size) for i in range(n)]
    return Dataset.from_arrays(ids, times, status, z[:, None], ['z'])
