import numpy as np
import pytest

from mfcoverage import geometry, mfgp


@pytest.fixture(scope="session")
def unit_grid():
    return geometry.GridEnvironment(21, 21)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def two_fidelity_hyper():
    return mfgp.MfgpHyper(
        (mfgp.KernelParams(5.0, 0.2), mfgp.KernelParams(10.0, 0.05)),
        (1.0,),
        (1.0, 1.0),
    )


def random_two_fidelity_problem(rng, n_low=None, n_high=None, zero_mean=True):
    """Random hyper + datasets for oracle comparisons (<= 20 points total)."""
    n_low = int(rng.integers(0, 11)) if n_low is None else n_low
    n_high = int(rng.integers(1, 10)) if n_high is None else n_high
    hyper = mfgp.MfgpHyper(
        (mfgp.KernelParams(float(rng.uniform(0.5, 8.0)), float(rng.uniform(0.05, 0.5))),
         mfgp.KernelParams(float(rng.uniform(0.5, 12.0)), float(rng.uniform(0.02, 0.3)))),
        (float(rng.uniform(0.2, 2.5)),),
        (float(rng.uniform(0.05, 1.5)), float(rng.uniform(0.05, 1.5))),
        None if zero_mean else (float(rng.normal()), float(rng.normal())),
    )
    low = mfgp.FidelityDataset(1, rng.uniform(0, 1, (n_low, 2)),
                               rng.normal(0, 2, n_low))
    high = mfgp.FidelityDataset(2, rng.uniform(0, 1, (n_high, 2)),
                                rng.normal(0, 2, n_high))
    return hyper, [low, high]
