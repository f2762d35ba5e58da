"""Laplace transforms of the jump-type CIR process and of its limit laws.

Everything is driven by the Riccati solution ``psi_{u,v}`` of

    psi' = (sigma^2 / 2) psi^2 - b psi + v,     psi(0) = u,

with discriminant root ``gamma_v = sqrt(b^2 - 2 sigma^2 v)``. The textbook
cosh/sinh forms overflow once ``gamma_v t`` passes about 1420, so every
formula here is rewritten in terms of ``E = exp(-gamma_v t)`` after the
dominant factor ``exp(gamma_v t / 2)`` has been cancelled. With

    g+ = gamma_v + b,   g- = gamma_v - b,

both nonnegative and computed without cancellation, the solution reads

    psi = [u (g- + g+ E) + 2v (1 - E)] / [g+ + g- E - sigma^2 u (1 - E)],

where every numerator term is <= 0 and every denominator term >= 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .exceptions import (DomainError, NotCritical, NotSubcritical, NotSupercritical,
                         UnsupportedLevy)
from .model import (CompoundPoisson, Constant, Exponential, Gamma, LevySpec, ModelParams,
                    ZeroLevy, levy_first_moment)
from .quadrature import adaptive_simpson

#: relative tolerance of the internally derived degenerate-branch tests
BRANCH_RTOL = 1e-12
#: half-width of the series window around v = 0 in stationary_laplace
SERIES_WINDOW = 1e-8


def _check_orthant(u: float, v: float = 0.0) -> None:
    if not (math.isfinite(u) and math.isfinite(v)):
        raise DomainError(f"transform arguments must be finite, got u={u!r}, v={v!r}")
    if u > 0 or v > 0:
        raise DomainError(f"transform arguments must satisfy u <= 0 and v <= 0, got u={u}, v={v}")


def _check_t(t: float) -> None:
    if not (math.isfinite(t) and t >= 0):
        raise DomainError(f"t must be finite and >= 0, got {t!r}")


@dataclass(frozen=True)
class RiccatiInputs:
    """Arguments ``(u, v)`` on the negative orthant with model constants ``b, sigma``."""

    u: float
    v: float
    b: float
    sigma: float

    def __post_init__(self):
        _check_orthant(self.u, self.v)
        if not (math.isfinite(self.b) and math.isfinite(self.sigma) and self.sigma > 0):
            raise DomainError(f"need finite b and sigma > 0, got b={self.b!r}, sigma={self.sigma!r}")

    @property
    def gamma(self) -> float:
        return gamma_v(self.b, self.sigma, self.v)


def gamma_v(b: float, sigma: float, v: float) -> float:
    """``sqrt(b^2 - 2 sigma^2 v)``; equals ``|b|`` at ``v = 0``."""
    if v > 0:
        raise DomainError(f"v must be <= 0, got {v}")
    return math.sqrt(b * b - 2.0 * sigma * sigma * v)


def _pieces(inp: RiccatiInputs, t: float):
    """Return ``(gamma, g+, g-, E, 1 - E)`` for the stable forms."""
    b, s2, v = inp.b, inp.sigma**2, inp.v
    g = inp.gamma
    # one of gamma +- b may cancel; rewrite it via (gamma+b)(gamma-b) = -2 sigma^2 v
    if b >= 0:
        gp = g + b
        gm = -2.0 * s2 * v / gp if gp > 0 else 0.0
    else:
        gm = g - b
        gp = -2.0 * s2 * v / gm
    x = g * t
    return g, gp, gm, math.exp(-x), -math.expm1(-x)


def psi_uv(inp: RiccatiInputs, t: float) -> float:
    """Solution ``psi_{u,v}(t)`` of the Riccati equation; always <= 0."""
    _check_t(t)
    u, v, s2 = inp.u, inp.v, inp.sigma**2
    if u == 0.0 and v == 0.0:
        return 0.0
    if t == 0.0:
        return u
    g, gp, gm, e, one_e = _pieces(inp, t)
    if g == 0.0:
        return u / (1.0 - 0.5 * s2 * u * t)
    num = u * (gm + gp * e) + 2.0 * v * one_e
    den = gp + gm * e - s2 * u * one_e
    return num / den


def _log_den_over_2g(inp: RiccatiInputs, t: float) -> float:
    # log(D / (2 gamma)) where D = g+ - sigma^2 u (1 - E) + g- E, all terms >= 0
    g, gp, gm, e, one_e = _pieces(inp, t)
    head = gp - inp.sigma**2 * inp.u * one_e
    if head > 0:
        return math.log(head + gm * e) - math.log(2.0 * g)
    # u = v = 0 with b < 0: D = g- E exactly
    return math.log(gm / (2.0 * g)) - g * t


def int_psi_uv(inp: RiccatiInputs, t: float) -> float:
    """``int_0^t psi_{u,v}(s) ds`` in closed form; always <= 0."""
    _check_t(t)
    u, v, s2 = inp.u, inp.v, inp.sigma**2
    if t == 0.0 or (u == 0.0 and v == 0.0):
        return 0.0
    g = inp.gamma
    if g == 0.0:
        return -2.0 / s2 * math.log1p(-0.5 * s2 * u * t)
    _, _, gm, _, _ = _pieces(inp, t)
    return -(gm * t + 2.0 * _log_den_over_2g(inp, t)) / s2


def psi_u0(u: float, t: float, b: float, sigma: float) -> float:
    """``psi_{u,0}(t)`` from the simplified marginal formula."""
    _check_orthant(u)
    _check_t(t)
    s2 = sigma * sigma
    if u == 0.0:
        return 0.0
    if b == 0.0:
        return u / (1.0 - 0.5 * s2 * u * t)
    if b > 0:
        e = math.exp(-b * t)
        return 2.0 * u * b * e / (s2 * u * math.expm1(-b * t) + 2.0 * b)
    # b < 0: divide through by exp(-bt) to keep every factor bounded
    e = math.exp(b * t)
    return 2.0 * u * b / (-s2 * u * math.expm1(b * t) + 2.0 * b * e)


def psi_0v(v: float, t: float, b: float, sigma: float) -> float:
    """``psi_{0,v}(t)`` from the simplified formula for the integral's transform."""
    _check_orthant(0.0, v)
    _check_t(t)
    if v == 0.0:
        return 0.0
    _, gp, gm, e, one_e = _pieces(RiccatiInputs(0.0, v, b, sigma), t)
    return 2.0 * v * one_e / (gp + gm * e)


# --------------------------------------------------------------------------- immigration


def immigration_integrand(levy: LevySpec, psi_val: float) -> float:
    """``int (exp(z psi) - 1) m(dz)`` for ``psi <= 0``."""
    if psi_val > 0:
        raise DomainError(f"psi must be <= 0, got {psi_val}")
    if isinstance(levy, ZeroLevy) or psi_val == 0.0:
        return 0.0
    if not isinstance(levy, CompoundPoisson):
        raise UnsupportedLevy(f"no immigration integrand for {levy!r}")
    c, law = levy.rate, levy.jump_law
    if isinstance(law, Exponential):
        return c * psi_val / (law.lam - psi_val)
    if isinstance(law, Constant):
        return c * math.expm1(law.z0 * psi_val)
    if isinstance(law, Gamma):
        return c * math.expm1(-law.shape * math.log1p(-psi_val / law.rate))
    raise UnsupportedLevy(f"no immigration integrand for jump law {law!r}")


def _is_bajd(levy: LevySpec) -> bool:
    return isinstance(levy, CompoundPoisson) and isinstance(levy.jump_law, Exponential)


def _bajd_constants(levy: LevySpec) -> tuple[float, float]:
    if isinstance(levy, ZeroLevy):
        return 0.0, 1.0
    if not _is_bajd(levy):
        raise UnsupportedLevy("closed forms need exponential jump sizes")
    return levy.rate, levy.jump_law.lam


def _q_integral(levy: LevySpec, psi: Callable[[float], float], t: float) -> float:
    if isinstance(levy, ZeroLevy) or t == 0.0:
        return 0.0
    return adaptive_simpson(lambda s: immigration_integrand(levy, psi(s)), 0.0, t)


# --------------------------------------------------------------------------- BAJD closed forms


def bajd_critical_phi(u: float, v: float, t: float, *, a: float, sigma: float,
                      c: float, lam: float, b: float = 0.0) -> float:
    """``phi_{u,v}(t)`` of the critical BAJD process.

    The joint transform is ``exp(psi_{u,v}(t) y0 + phi_{u,v}(t))``.
    """
    if b != 0:
        raise NotCritical(f"the critical closed form needs b = 0, got b={b}")
    _check_orthant(u, v)
    _check_t(t)
    s2 = sigma * sigma
    if v == 0.0:
        return (-2.0 * a / s2 * math.log1p(-0.5 * s2 * u * t)
                - 2.0 * c / (s2 * lam) * math.log1p(-s2 * lam * u * t / (2.0 * (lam - u))))
    inp = RiccatiInputs(u, v, 0.0, sigma)
    g = inp.gamma
    a_term = a * int_psi_uv(inp, t)
    al1, al2 = u * g + 2.0 * v, u * g - 2.0 * v
    be1 = lam * (-s2 * u + g) - al1
    be2 = lam * (s2 * u + g) - al2
    e = math.exp(-g * t)
    scale = max(abs(lam * s2 * u), abs(lam * g), abs(al2))
    if abs(be2) <= BRANCH_RTOL * scale:
        return a_term + c / be1 * (al1 * t - al2 / g * math.expm1(-g * t))
    # log((be1 e^{gt} + be2) / (be1 + be2)) with the growing exponential factored out
    log_ratio = g * t + math.log(be1 + be2 * e) - math.log(be1 + be2)
    return a_term + c * (al2 / be2 * t + (al1 / be1 - al2 / be2) / g * log_ratio)


def _log1p_growth(k: float, x: float) -> float:
    """``log(1 + k (e^x - 1))`` for ``x >= 0`` and ``k >= 0`` without overflow."""
    if k == 0.0 or x == 0.0:
        return 0.0
    if x < 1.0:
        return math.log1p(k * math.expm1(x))
    return x + math.log(k + (1.0 - k) * math.exp(-x))


def bajd_supercritical_phi(u: float, t: float, *, a: float, b: float, sigma: float,
                           c: float, lam: float) -> float:
    """``phi_{u,0}(t)`` of the supercritical BAJD process (``b < 0``).

    The marginal transform is ``exp(psi_{u,0}(t) y0 + phi_{u,0}(t))``.
    """
    if not b < 0:
        raise NotSupercritical(f"the supercritical closed form needs b < 0, got b={b}")
    _check_orthant(u)
    _check_t(t)
    s2 = sigma * sigma
    if u == 0.0:
        return 0.0
    crit = 2.0 * b / s2
    if abs(u - crit) <= BRANCH_RTOL * abs(crit):
        return 2.0 * b * (2.0 * a * b - c * s2 - a * s2 * lam) / (s2 * (-s2 * lam + 2.0 * b)) * t
    x = -b * t
    k1 = s2 * u / (2.0 * b)
    k2 = (-s2 * lam + 2.0 * b) * u / (2.0 * b * (u - lam))
    return (-2.0 * a / s2 * _log1p_growth(k1, x)
            + 2.0 * c / (-s2 * lam + 2.0 * b) * _log1p_growth(k2, x))


# --------------------------------------------------------------------------- transforms


_METHODS = ("auto", "quadrature", "closed")


def _check_method(method: str) -> None:
    if method not in _METHODS:
        raise ValueError(f"method must be one of {_METHODS}, got {method!r}")


def log_joint_laplace(params: ModelParams, u: float, v: float, t: float,
                      method: str = "auto") -> float:
    """Logarithm of ``E exp(u Y_t + v int_0^t Y_s ds)``."""
    _check_orthant(u, v)
    _check_t(t)
    _check_method(method)
    inp = RiccatiInputs(u, v, params.b, params.sigma)
    head = psi_uv(inp, t) * params.y0
    closed_ok = isinstance(params.levy, ZeroLevy) or (_is_bajd(params.levy) and params.b == 0)
    if method == "closed" and not closed_ok:
        raise UnsupportedLevy("no closed form for this Levy measure and regime")
    if method != "quadrature" and closed_ok and not isinstance(params.levy, ZeroLevy):
        c, lam = _bajd_constants(params.levy)
        return head + bajd_critical_phi(u, v, t, a=params.a, sigma=params.sigma, c=c, lam=lam)
    q = _q_integral(params.levy, lambda s: psi_uv(inp, s), t)
    return head + params.a * int_psi_uv(inp, t) + q


def joint_laplace(params: ModelParams, u: float, v: float, t: float,
                  method: str = "auto") -> float:
    """``E exp(u Y_t + v int_0^t Y_s ds)`` for ``u, v <= 0``.

    ``method="auto"`` uses the critical BAJD closed form when it applies
    and quadrature of the immigration term otherwise; ``"quadrature"`` and
    ``"closed"`` force one route.
    """
    return math.exp(log_joint_laplace(params, u, v, t, method))


def marginal_laplace_y(params: ModelParams, u: float, t: float, method: str = "auto") -> float:
    """``E exp(u Y_t)``."""
    _check_orthant(u)
    _check_t(t)
    _check_method(method)
    b, sigma = params.b, params.sigma
    head = psi_u0(u, t, b, sigma) * params.y0
    bajd = _is_bajd(params.levy)
    if method == "closed" and not (bajd or isinstance(params.levy, ZeroLevy)):
        raise UnsupportedLevy("no closed form for this Levy measure")
    if method != "quadrature" and bajd:
        c, lam = params.levy.rate, params.levy.jump_law.lam
        if b < 0:
            phi = bajd_supercritical_phi(u, t, a=params.a, b=b, sigma=sigma, c=c, lam=lam)
            return math.exp(head + phi)
        if b == 0:
            return math.exp(head + bajd_critical_phi(u, 0.0, t, a=params.a, sigma=sigma, c=c, lam=lam))
        if method == "closed":
            raise UnsupportedLevy("the BAJD closed forms cover b <= 0 only")
    inp = RiccatiInputs(u, 0.0, b, sigma)
    q = _q_integral(params.levy, lambda s: psi_u0(u, s, b, sigma), t)
    return math.exp(head + params.a * int_psi_uv(inp, t) + q)


def marginal_laplace_int_y(params: ModelParams, v: float, t: float) -> float:
    """``E exp(v int_0^t Y_s ds)``."""
    _check_orthant(0.0, v)
    _check_t(t)
    b, sigma = params.b, params.sigma
    inp = RiccatiInputs(0.0, v, b, sigma)
    q = _q_integral(params.levy, lambda s: psi_0v(v, s, b, sigma), t)
    return math.exp(psi_0v(v, t, b, sigma) * params.y0 + params.a * int_psi_uv(inp, t) + q)


def critical_limit_laplace(u: float, v: float, *, a: float, sigma: float,
                           levy: LevySpec = ZeroLevy()) -> float:
    """``E exp(u Y1 + v int_0^1 Y_s ds)`` for the critical limit diffusion.

    The limit process is a CIR diffusion with ``b = 0``, drift
    ``a + int z m(dz)`` and zero initial value.
    """
    _check_orthant(u, v)
    drift = a + levy_first_moment(levy)
    return math.exp(drift * int_psi_uv(RiccatiInputs(u, v, 0.0, sigma), 1.0))


def supercritical_v_laplace(u: float, params: ModelParams) -> float:
    """``E exp(u V)`` for the almost sure limit ``V`` of ``exp(bt) Y_t``."""
    b, s2 = params.b, params.sigma**2
    if not b < 0:
        raise NotSupercritical(f"V exists only for b < 0, got b={b}")
    _check_orthant(u)
    if u == 0.0:
        return 1.0
    k = s2 * u / (2.0 * b)
    log_val = u * params.y0 / (1.0 + k) - 2.0 * params.a / s2 * math.log1p(k)
    if not isinstance(params.levy, ZeroLevy):
        # the integrand decays like exp(b y); beyond 60/|b| it is below e^-60 times its start
        y_max = 60.0 / abs(b)

        def tilde_psi(y):
            e = math.exp(b * y)
            return u * e / (1.0 + k * e)

        log_val += adaptive_simpson(lambda y: immigration_integrand(params.levy, tilde_psi(y)), 0.0, y_max)
    return math.exp(log_val)


def _stationary_ratio(v: float, params: ModelParams, drift: float) -> float:
    s2, b = params.sigma**2, params.b
    if abs(v) < SERIES_WINDOW:
        # F(v) ~ drift * v and R(v) = v (sigma^2 v / 2 - b)
        return drift / (0.5 * s2 * v - b)
    f = params.a * v + immigration_integrand(params.levy, v)
    r = 0.5 * s2 * v * v - b * v
    return f / r


def stationary_laplace(u: float, params: ModelParams) -> float:
    """``int exp(u y) pi(dy)`` for the stationary law ``pi`` (``b > 0``)."""
    if not params.b > 0:
        raise NotSubcritical(f"the stationary law needs b > 0, got b={params.b}")
    _check_orthant(u)
    if u == 0.0:
        return 1.0
    drift = params.drift_total
    return math.exp(adaptive_simpson(lambda v: _stationary_ratio(v, params, drift), u, 0.0))
