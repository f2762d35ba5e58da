"""Kolmogorov-Smirnov distances, asymptotic critical values and Monte-Carlo summaries."""
from __future__ import annotations

import math
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy import stats as _st

from .exceptions import EmptyInput

Target = Union[Callable[[np.ndarray], np.ndarray], Sequence[float], np.ndarray]


def _sample(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float).reshape(-1)
    if arr.size == 0:
        raise EmptyInput(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def ks_statistic(samples, target: Target) -> float:
    """Sup distance between the empirical CDF of ``samples`` and ``target``.

    ``target`` is either a vectorized CDF (one-sample distance) or a
    second sample (two-sample distance).
    """
    x = _sample(samples, "samples")
    if callable(target):
        return float(_st.kstest(x, target, method="asymp").statistic)
    y = _sample(target, "target sample")
    return float(_st.ks_2samp(x, y, method="asymp").statistic)


def ks_coefficient(alpha: float) -> float:
    """Asymptotic Kolmogorov quantile ``c(alpha)`` (1.358 at 5%, 1.628 at 1%)."""
    return float(_st.kstwobign.isf(alpha))


def ks_critical(alpha: float, n: int, m: Optional[int] = None) -> float:
    """Asymptotic critical value for ``n`` samples (against ``m`` others if given)."""
    if n <= 0 or (m is not None and m <= 0):
        raise EmptyInput("critical values need positive sample sizes")
    eff = n if m is None else n * m / (n + m)
    return ks_coefficient(alpha) / math.sqrt(eff)


def standard_normal_cdf(x):
    return _st.norm.cdf(x)


def normal_cdf(variance: float) -> Callable:
    sd = math.sqrt(variance)
    return lambda x: _st.norm.cdf(x, scale=sd)


def mean_se(x) -> tuple[float, float]:
    """Compensated mean and its standard error (0 for a single value)."""
    arr = _sample(x, "samples")
    n = arr.size
    mean = math.fsum(arr) / n
    if n == 1:
        return mean, 0.0
    var = math.fsum((arr - mean) ** 2) / (n - 1)
    return mean, math.sqrt(var / n)


def variance(x) -> float:
    """Unbiased sample variance with compensated sums."""
    arr = _sample(x, "samples")
    if arr.size < 2:
        return float("nan")
    mean = math.fsum(arr) / arr.size
    return math.fsum((arr - mean) ** 2) / (arr.size - 1)
