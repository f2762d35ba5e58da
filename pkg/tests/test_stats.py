import math

import numpy as np
import pytest

from jumpcir.exceptions import EmptyInput
from jumpcir.stats import (ks_coefficient, ks_critical, ks_statistic, mean_se, normal_cdf,
                           standard_normal_cdf, variance)


def test_ks_examples():
    x = np.random.default_rng(0).standard_normal(500)
    assert ks_statistic(x, x) == 0.0
    assert ks_statistic([0.0], standard_normal_cdf) == 0.5
    with pytest.raises(EmptyInput):
        ks_statistic([], standard_normal_cdf)
    with pytest.raises(EmptyInput):
        ks_statistic([1.0], [])
    with pytest.raises(ValueError):
        ks_statistic([math.nan], standard_normal_cdf)


def test_ks_against_direct_definition():
    rng = np.random.default_rng(1)
    x, y = rng.standard_normal(300), rng.standard_normal(200) + 0.2
    grid = np.concatenate([x, y])
    direct = np.max(np.abs(np.searchsorted(np.sort(x), grid, "right") / 300
                           - np.searchsorted(np.sort(y), grid, "right") / 200))
    assert ks_statistic(x, y) == pytest.approx(direct, abs=1e-15)
    xs = np.sort(x)
    cdf = standard_normal_cdf(xs)
    one = max(np.max(np.arange(1, 301) / 300 - cdf), np.max(cdf - np.arange(300) / 300))
    assert ks_statistic(x, standard_normal_cdf) == pytest.approx(one, abs=1e-15)


def test_critical_values():
    assert ks_coefficient(0.05) == pytest.approx(1.3581, abs=1e-4)
    assert ks_coefficient(0.01) == pytest.approx(1.6276, abs=1e-4)
    assert ks_critical(0.01, 10000) == pytest.approx(0.016276, abs=1e-6)
    assert ks_critical(0.05, 1000, 1000) == pytest.approx(1.3581 / math.sqrt(500), abs=1e-5)
    with pytest.raises(EmptyInput):
        ks_critical(0.05, 0)


def test_ks_false_rejection_rate():
    crit = ks_critical(0.01, 10_000)
    rejects = sum(ks_statistic(np.random.default_rng(100 + k).standard_normal(10_000), standard_normal_cdf) > crit
                  for k in range(100))
    assert rejects <= 1


def test_moments():
    m, se = mean_se([1.0, 2.0, 3.0, 4.0])
    assert m == 2.5 and se == pytest.approx(math.sqrt(5 / 3 / 4))
    assert mean_se([7.0]) == (7.0, 0.0)
    assert variance([1.0, 2.0, 3.0]) == 1.0
    assert math.isnan(variance([1.0]))
    assert normal_cdf(4.0)(2.0) == pytest.approx(standard_normal_cdf(1.0))
    # compensated sums are order independent
    x = np.random.default_rng(2).standard_normal(1000) * 1e8
    assert mean_se(x) == mean_se(x[::-1])
