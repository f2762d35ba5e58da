"""Limit laws of the growth-rate MLE in the three regimes, and samplers for them.

* subcritical: ``sqrt(T)(b_hat - b) -> N(0, sigma^2 b / (a + int z m))``;
* critical: ``T b_hat -> (a_eff - Y1) / int_0^1 Y_s ds`` for a CIR diffusion
  ``Y`` with ``b = 0``, drift ``a_eff = a + int z m`` and ``Y_0 = 0``;
* supercritical: ``exp(-bT/2)(b_hat - b) -> sigma Z (-V/b)^(-1/2)`` with
  ``V = lim exp(bt) Y_t`` independent of ``Z ~ N(0, 1)``.

With the random scaling ``sqrt(int Y)(b_hat - b)/sigma`` the limit is
standard normal whenever ``b != 0``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import _kernels
from .exceptions import HypothesisViolation, InvalidParameter, NotSupercritical, UnsupportedLevy
from .model import (CompoundPoisson, Exponential, ModelParams, Regime, ZeroLevy, classify,
                    levy_first_moment)
from .simulate import simulate_summary

CRITICAL_DT = 1e-3
DIRECT_HORIZON = 30.0


class Scaling(enum.Enum):
    DETERMINISTIC = "deterministic"
    RANDOM = "random"


# --------------------------------------------------------------------------- law records


@dataclass(frozen=True)
class StandardNormal:
    pass


@dataclass(frozen=True)
class SubcriticalNormal:
    variance: float


@dataclass(frozen=True)
class CriticalRatio:
    """Law of ``(a_eff - Y1) / int Y`` (or over ``sigma sqrt(int Y)`` if ``random``)."""

    a_eff: float
    sigma: float
    random: bool = False


@dataclass(frozen=True)
class SupercriticalMixed:
    params: ModelParams


LimitLaw = Union[StandardNormal, SubcriticalNormal, CriticalRatio, SupercriticalMixed]


@dataclass(frozen=True)
class LimitDescription:
    """Target law plus the name of the factor multiplying ``b_hat - b``."""

    law: LimitLaw
    scaling: Scaling
    factor: str

    def scale(self, T: float, b: float, int_y: float = float("nan"), sigma: float = 1.0) -> float:
        if self.scaling is Scaling.RANDOM:
            return math.sqrt(int_y) / sigma
        return deterministic_scale(b, T)


def deterministic_scale(b: float, T: float) -> float:
    """``sqrt(T)``, ``T`` or ``exp(-bT/2)`` by regime."""
    if b > 0:
        return math.sqrt(T)
    if b == 0:
        return float(T)
    return math.exp(-0.5 * b * T)


def check_hypotheses(params: ModelParams) -> None:
    """Raise :class:`HypothesisViolation` unless the regime's limit theorem applies."""
    a, y0, mu = params.a, params.y0, levy_first_moment(params.levy)
    regime = classify(params)
    if regime is Regime.SUBCRITICAL:
        if not a > 0:
            raise HypothesisViolation("the subcritical limit theorem needs a > 0")
    elif regime is Regime.CRITICAL:
        if not (a > 0 or (y0 > 0 and mu > 0)):
            raise HypothesisViolation("the critical limit theorem needs a > 0, or a = 0 with y0 > 0 and jumps")
    else:
        has_jumps = not isinstance(params.levy, ZeroLevy)
        if not (a > 0 or (has_jumps and y0 > 0)):
            raise HypothesisViolation(
                "the supercritical limit theorem needs a > 0, or a = 0 with a nonzero Levy measure and y0 > 0")


def limit_law_for(params: ModelParams, scaling: Union[Scaling, str] = Scaling.DETERMINISTIC) -> LimitDescription:
    scaling = Scaling(scaling)
    check_hypotheses(params)
    regime = classify(params)
    a_eff = params.drift_total
    if scaling is Scaling.RANDOM:
        if regime is Regime.CRITICAL:
            return LimitDescription(CriticalRatio(a_eff, params.sigma, random=True), scaling, "sqrt(int Y)/sigma")
        return LimitDescription(StandardNormal(), scaling, "sqrt(int Y)/sigma")
    if regime is Regime.SUBCRITICAL:
        return LimitDescription(SubcriticalNormal(params.sigma**2 * params.b / a_eff), scaling, "sqrt(T)")
    if regime is Regime.CRITICAL:
        return LimitDescription(CriticalRatio(a_eff, params.sigma), scaling, "T")
    return LimitDescription(SupercriticalMixed(params), scaling, "exp(-bT/2)")


# --------------------------------------------------------------------------- critical


@dataclass(frozen=True)
class CriticalDraw:
    deterministic: float
    random: float


def sample_critical_state(a_eff: float, sigma: float, rng: np.random.Generator,
                          dt: float = CRITICAL_DT) -> tuple[float, float]:
    """``(Y1, int_0^1 Y_s ds)`` of the critical limit diffusion started at 0.

    The diffusion is propagated exactly on a ``dt`` grid; the integral uses
    the drift-corrected trapezoid rule, which is unbiased given the grid.
    """
    if not (sigma > 0 and dt > 0 and a_eff >= 0):
        raise InvalidParameter("need a_eff >= 0, sigma > 0 and dt > 0")
    n = max(1, math.ceil(1.0 / dt - 1e-9))
    times = np.linspace(0.0, 1.0, n + 1)
    y1, _, int_y, _, _ = _kernels.exact_walk(rng, 0.0, float(a_eff), 0.0, float(sigma), times,
                                             np.zeros(n + 1), np.empty(0))
    return y1, int_y


def _critical_draw(a_eff: float, sigma: float, rng: np.random.Generator, dt: float) -> CriticalDraw:
    y1, int_y = sample_critical_state(a_eff, sigma, rng, dt)
    return CriticalDraw((a_eff - y1) / int_y, (a_eff - y1) / (sigma * math.sqrt(int_y)))


def sample_critical_limit(a_eff: float, sigma: float, rng: np.random.Generator,
                          dt: float = CRITICAL_DT, scaling: Union[Scaling, str] = Scaling.DETERMINISTIC) -> float:
    """One draw of the critical limit ratio (see :func:`sample_critical_state`)."""
    if not a_eff > 0:
        raise HypothesisViolation(f"the critical limit law needs a_eff > 0, got {a_eff}")
    if not sigma > 0 or not dt > 0:
        raise InvalidParameter("need sigma > 0 and dt > 0")
    d = _critical_draw(float(a_eff), float(sigma), rng, dt)
    return d.random if Scaling(scaling) is Scaling.RANDOM else d.deterministic


def sample_critical_pair(a_eff: float, sigma: float, rng: np.random.Generator,
                         dt: float = CRITICAL_DT) -> CriticalDraw:
    """Both scalings of the critical limit from one simulated path."""
    if not a_eff > 0:
        raise HypothesisViolation(f"the critical limit law needs a_eff > 0, got {a_eff}")
    return _critical_draw(float(a_eff), float(sigma), rng, dt)


# --------------------------------------------------------------------------- supercritical


@dataclass(frozen=True)
class Direct:
    """``exp(bT) Y_T`` from one path; ``T`` defaults to ``30 / |b|``."""

    T: Optional[float] = None


@dataclass(frozen=True)
class Representation:
    """``Z_{-1/b}`` plus the limit of the jump-only supercritical process."""


@dataclass(frozen=True)
class BajdRepresentation:
    """Sum of two independent critical CIR endpoints (exponential jumps only)."""


VMethod = Union[Direct, Representation, BajdRepresentation]


def _direct_v(params: ModelParams, T: float, rng: np.random.Generator) -> float:
    # exact transitions need no grid between jumps: one step plus the jump points
    s = simulate_summary(params, T, 1, rng)
    return math.exp(params.b * T) * s.y_end


def _critical_endpoint(y0: float, drift: float, sigma: float, t: float, rng) -> float:
    return float(_kernels.cir_draw(rng, float(y0), float(t), float(drift), 0.0, float(sigma)))


def sample_v(params: ModelParams, rng: np.random.Generator, method: VMethod = Direct()) -> float:
    """One draw of ``V``, the almost sure limit of ``exp(bt) Y_t``."""
    b = params.b
    if not b < 0:
        raise NotSupercritical(f"V exists only for b < 0, got b={b}")
    if isinstance(method, Direct):
        T = DIRECT_HORIZON / abs(b) if method.T is None else float(method.T)
        if not T > 0:
            raise InvalidParameter(f"horizon must be > 0, got {T}")
        return _direct_v(params, T, rng)
    if isinstance(method, Representation):
        z = _critical_endpoint(params.y0, params.a, params.sigma, -1.0 / b, rng)
        if isinstance(params.levy, ZeroLevy):
            return z
        jump_only = params.replace(a=0.0, y0=0.0)
        return z + _direct_v(jump_only, DIRECT_HORIZON / abs(b), rng)
    if isinstance(method, BajdRepresentation):
        levy = params.levy
        if not (isinstance(levy, CompoundPoisson) and isinstance(levy.jump_law, Exponential)):
            raise UnsupportedLevy("the BAJD representation needs exponential jump sizes")
        s2, c, lam = params.sigma**2, levy.rate, levy.jump_law.lam
        first = _critical_endpoint(params.y0, params.a, params.sigma, -1.0 / b, rng)
        drift = c / (lam - 2.0 * b / s2)
        horizon = -(1.0 / b) * (1.0 - 2.0 * b / (s2 * lam))
        return first + _critical_endpoint(0.0, drift, params.sigma, horizon, rng)
    raise InvalidParameter(f"unknown sampling method {method!r}")


def sample_supercritical_limit(params: ModelParams, rng: np.random.Generator,
                               method: VMethod = Direct()) -> float:
    """One draw of ``sigma Z (-V/b)^(-1/2)``."""
    if not params.b < 0:
        raise NotSupercritical(f"the mixed normal limit needs b < 0, got b={params.b}")
    check_hypotheses(params)
    v = sample_v(params, rng, method)
    z = rng.standard_normal()
    return params.sigma * z / math.sqrt(-v / params.b)
