"""Statistics of a continuously observed path: jumps, sigma^2, MLE of b, likelihood ratio.

The growth-rate MLE

    b_hat = -(Y_T - y0 - a T - J_T) / int_0^T Y_s ds

needs neither ``sigma`` nor the Levy measure. Time integrals are left-Riemann
sums over the observation grid, and ``J_T`` is read from the jump
annotations the simulator stores on every path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .exceptions import DegeneratePath, InvalidParameter
from .simulate import Path, integral_of_path
from .subordinator import JumpTrain, jt_at


@dataclass(frozen=True)
class Observation:
    """A path together with the known constants needed by the estimators.

    ``threshold`` (or, failing that, ``sigma_known``) is used only to
    find the jumps of an unannotated path.
    """

    path: Path
    a_known: float
    sigma_known: Optional[float] = None
    threshold: Optional[float] = None

    def __post_init__(self):
        if not isinstance(self.path, Path):
            raise InvalidParameter("path must be a Path")
        if not (math.isfinite(self.a_known) and self.a_known >= 0):
            raise InvalidParameter(f"a_known must be >= 0, got {self.a_known!r}")
        if self.sigma_known is not None and not (math.isfinite(self.sigma_known) and self.sigma_known > 0):
            raise InvalidParameter(f"sigma_known must be > 0, got {self.sigma_known!r}")
        if self.threshold is not None and not self.threshold > 0:
            raise InvalidParameter(f"threshold must be > 0, got {self.threshold!r}")

    def require_sigma(self) -> float:
        if self.sigma_known is None:
            raise InvalidParameter("this statistic needs sigma_known")
        return float(self.sigma_known)


def default_threshold(path: Path, sigma: float) -> float:
    """``4 sigma sqrt(dt)`` with ``dt`` the largest grid step."""
    return 4.0 * sigma * math.sqrt(float(np.max(np.diff(path.times))))


def extract_jumps(path: Path, threshold: Optional[float] = None,
                  sigma: Optional[float] = None) -> JumpTrain:
    """Jumps of ``path``.

    Annotated paths return their stored jumps. Otherwise every grid
    increment above ``threshold`` counts as a jump; the threshold defaults
    to ``4 sigma sqrt(dt)``, which then needs ``sigma``.
    """
    if path.annotated:
        return path.jumps
    if threshold is None:
        if sigma is None:
            raise InvalidParameter("an unannotated path needs a threshold or sigma")
        threshold = default_threshold(path, sigma)
    if not threshold > 0:
        raise InvalidParameter(f"threshold must be > 0, got {threshold!r}")
    inc = np.diff(path.values)
    idx = np.flatnonzero(inc > threshold) + 1
    return JumpTrain(path.horizon, path.times[idx], inc[idx - 1])


def _positive_integral(path: Path) -> float:
    int_y = integral_of_path(path)
    if not int_y > 0:
        raise DegeneratePath("the time integral of the path vanishes")
    return int_y


def realized_qv(path: Path) -> float:
    """Sum of squared grid increments, jumps included."""
    return math.fsum(np.diff(path.values) ** 2)


def sigma_sq_hat(path: Path, threshold: Optional[float] = None,
                 sigma: Optional[float] = None) -> float:
    """Realized continuous quadratic variation over the time integral.

    Squared jumps are subtracted inside one compensated sum, so a path
    whose whole variation is carried by its jumps gives exactly 0.
    """
    int_y = _positive_integral(path)
    jumps = extract_jumps(path, threshold, sigma)
    terms = np.concatenate([np.diff(path.values) ** 2, -(jumps.sizes**2)])
    return math.fsum(terms) / int_y


def b_hat_from_stats(y_end: float, y0: float, a: float, T: float, j_t: float, int_y: float) -> float:
    """The MLE formula on precomputed path statistics."""
    if not int_y > 0:
        raise DegeneratePath("the time integral of the path vanishes")
    return -(y_end - y0 - a * T - j_t) / int_y


def _martingale_part(obs: Observation) -> float:
    # Y_T - y0 - a T - J_T
    p = obs.path
    return p.values[-1] - p.values[0] - obs.a_known * p.horizon - jt_at(extract_jumps(p, obs.threshold, obs.sigma_known), p.horizon)


def mle_b(obs: Observation) -> float:
    """Maximum likelihood estimate of ``b`` from one observed path."""
    int_y = _positive_integral(obs.path)
    return -_martingale_part(obs) / int_y


def log_likelihood_ratio(obs: Observation, b: float, b_ref: float) -> float:
    """Log Radon-Nikodym derivative of the law under ``b`` against ``b_ref``.

    As a function of ``b`` this is a downward parabola with vertex at
    :func:`mle_b`.
    """
    s2 = obs.require_sigma() ** 2
    int_y = _positive_integral(obs.path)
    m = _martingale_part(obs)
    return -(b - b_ref) / s2 * m - (b * b - b_ref * b_ref) / (2.0 * s2) * int_y


def random_scaled_error(obs: Observation, b_true: float) -> float:
    """``(1/sigma) sqrt(int Y) (b_hat - b_true)``."""
    sigma = obs.require_sigma()
    int_y = _positive_integral(obs.path)
    return math.sqrt(int_y) * (mle_b(obs) - b_true) / sigma


# --------------------------------------------------------------------------- estimator


PathLike = Union[Path, Sequence[Path]]


def _as_paths(X) -> list[Path]:
    if isinstance(X, Path):
        return [X]
    try:
        paths = list(X)
    except TypeError:
        raise InvalidParameter(f"expected a Path or a sequence of Paths, got {type(X).__name__}") from None
    if not paths:
        raise InvalidParameter("no paths given")
    for p in paths:
        if not isinstance(p, Path):
            raise InvalidParameter(f"expected Path items, got {type(p).__name__}")
    return paths


class DriftMLE(TransformerMixin, BaseEstimator):
    """Growth-rate MLE as a scikit-learn estimator.

    ``fit`` pools all given paths into one likelihood, which for
    independent paths is maximized by the ratio of summed numerators and
    summed time integrals. ``transform`` returns one row of per-path
    statistics.

    Parameters
    ----------
    a : float
        Known drift constant.
    sigma : float, optional
        Known diffusion coefficient. Needed only for the random-scaled
        error and for thresholding unannotated paths.
    threshold : float, optional
        Jump threshold for unannotated paths.
    b_true : float, optional
        If given, ``transform`` appends the random-scaled error.

    Attributes
    ----------
    b_hat_ : float
        Pooled estimate.
    sigma_sq_hat_ : float
        Pooled continuous quadratic variation over the pooled integral.
    n_paths_ : int
    """

    def __init__(self, a: float = 0.0, sigma: Optional[float] = None,
                 threshold: Optional[float] = None, b_true: Optional[float] = None):
        self.a = a
        self.sigma = sigma
        self.threshold = threshold
        self.b_true = b_true

    def _validate_params(self):
        Observation(Path([0.0], [0.0]), float(self.a), self.sigma)
        if self.threshold is not None and not self.threshold > 0:
            raise InvalidParameter(f"threshold must be > 0, got {self.threshold!r}")

    def _stats(self, path: Path):
        jumps = extract_jumps(path, self.threshold, self.sigma)
        int_y = integral_of_path(path)
        m = path.values[-1] - path.values[0] - self.a * path.horizon - jumps.total
        qv = math.fsum(np.concatenate([np.diff(path.values) ** 2, -(jumps.sizes**2)]))
        return m, int_y, qv, jumps.total

    def fit(self, X: PathLike, y=None) -> "DriftMLE":
        self._validate_params()
        stats = [self._stats(p) for p in _as_paths(X)]
        int_total = math.fsum(s[1] for s in stats)
        if not int_total > 0:
            raise DegeneratePath("the pooled time integral vanishes")
        self.b_hat_ = -math.fsum(s[0] for s in stats) / int_total
        self.sigma_sq_hat_ = math.fsum(s[2] for s in stats) / int_total
        self.n_paths_ = len(stats)
        return self

    def transform(self, X: PathLike) -> np.ndarray:
        """Rows ``[b_hat, sigma_sq_hat, int_y, j_t]`` (plus the scaled error if ``b_true`` is set)."""
        check_is_fitted(self, "b_hat_")
        rows = []
        for path in _as_paths(X):
            m, int_y, qv, j_t = self._stats(path)
            if not int_y > 0:
                raise DegeneratePath("the time integral of the path vanishes")
            b_hat = -m / int_y
            row = [b_hat, qv / int_y, int_y, j_t]
            if self.b_true is not None:
                if self.sigma is None:
                    raise InvalidParameter("the scaled error needs sigma")
                row.append(math.sqrt(int_y) * (b_hat - self.b_true) / self.sigma)
            rows.append(row)
        return np.asarray(rows, dtype=float)

    def get_feature_names_out(self, input_features=None):
        names = ["b_hat", "sigma_sq_hat", "int_y", "j_t"]
        if self.b_true is not None:
            names.append("scaled_error")
        return np.asarray(names, dtype=object)
