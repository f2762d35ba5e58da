import numpy as np
import pytest

from jumpcir.model import CompoundPoisson, Constant, ModelParams, bajd


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def bajd_sub():
    return ModelParams(a=1.0, b=1.0, sigma=0.5, levy=bajd(1.0, 2.0), y0=1.0)


@pytest.fixture
def bajd_crit():
    return ModelParams(a=1.0, b=0.0, sigma=0.5, levy=bajd(1.0, 2.0), y0=1.0)


@pytest.fixture
def bajd_super():
    return ModelParams(a=1.0, b=-1.0, sigma=0.5, levy=bajd(1.0, 2.0), y0=1.0)


@pytest.fixture
def const_super():
    return ModelParams(a=1.0, b=-1.0, sigma=0.5, levy=CompoundPoisson(1.0, Constant(0.7)), y0=1.0)


def within_se(values, target, k=4.0):
    values = np.asarray(values, dtype=float)
    se = values.std(ddof=1) / np.sqrt(values.size)
    return abs(values.mean() - target) <= k * se, values.mean(), se
