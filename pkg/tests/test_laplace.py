import math

import numpy as np
import pytest

from jumpcir.exceptions import DomainError, NotCritical, NotSubcritical, NotSupercritical
from jumpcir.laplace import (RiccatiInputs, bajd_critical_phi, bajd_supercritical_phi,
                             critical_limit_laplace, gamma_v, immigration_integrand, int_psi_uv,
                             joint_laplace, log_joint_laplace, marginal_laplace_int_y,
                             marginal_laplace_y, psi_0v, psi_u0, psi_uv, stationary_laplace,
                             supercritical_v_laplace)
from jumpcir.model import (CompoundPoisson, Constant, Exponential, Gamma, ModelParams, ZeroLevy,
                           bajd, stationary_mean)
from jumpcir.quadrature import adaptive_simpson

from oracles import composite_simpson, rk4_psi

UV_GRID = [(0.0, -1.0), (-1.0, 0.0), (-1.0, -1.0), (-2.0, -0.5), (-0.1, -3.0)]
T_GRID = [0.1, 0.5, 1.0, 5.0, 20.0]

# 30-digit values from an mpmath ODE solve of psi and mpmath quadrature of the exponent
MP_BAJD_CRIT_JOINT = 0.0285577764457037698122693538552884     # a=1,b=0,s=.5,c=1,lam=2,y0=1,u=v=-1,t=1
MP_BAJD_SUPER_MARG = 0.0146081345995272727284244383288136     # same with b=-1, u=-1, v=0, t=1
MP_CONST_SUB_JOINT = 0.217591562817500534261801576134         # Constant(0.7), b=1, u=-.5, v=-.3, t=2
MP_ZERO_SUB_JOINT = 0.151758740008398739643220709845799       # Zero, b=1, u=v=-1, t=1
MP_STATIONARY = 0.265579676939791117882569210129              # BAJD b=1, u=-1
MP_V_LAPLACE = 0.108656969633670498179763550925               # BAJD b=-1, y0=1, u=-1
MP_CRIT_LIMIT = 0.123040128827834998933806007452              # a_eff=1.5, sigma=.5, u=v=-1


def test_gamma_examples():
    assert gamma_v(0.0, 1.0, 0.0) == 0.0
    assert gamma_v(3.0, 2.0, -2.0) == 5.0
    assert gamma_v(-1.0, 0.7, 0.0) == 1.0
    with pytest.raises(DomainError):
        gamma_v(1.0, 1.0, 0.5)


def test_psi_examples():
    assert psi_uv(RiccatiInputs(0.0, 0.0, 1.0, 1.0), 3.0) == 0.0
    assert psi_uv(RiccatiInputs(-1.0, 0.0, 0.0, 1.0), 2.0) == pytest.approx(-0.5, abs=1e-15)
    assert psi_uv(RiccatiInputs(-1.0, 0.0, 1.0, math.sqrt(2)), math.log(2)) == pytest.approx(-1 / 3, abs=1e-15)
    assert rk4_psi(-1.0, 0.0, 0.0, 1.0, 2.0) == pytest.approx(-0.5, abs=1e-12)
    assert rk4_psi(-1.0, 0.0, 1.0, math.sqrt(2), math.log(2)) == pytest.approx(-1 / 3, abs=1e-12)


@pytest.mark.parametrize("b", [1.0, 0.0, -1.0])
def test_psi_matches_rk4_everywhere(b):
    worst = 0.0
    for u, v in UV_GRID:
        inp = RiccatiInputs(u, v, b, 0.5)
        assert psi_uv(inp, 0.0) == u
        for t in T_GRID:
            worst = max(worst, abs(psi_uv(inp, t) - rk4_psi(u, v, b, 0.5, t)))
    assert worst < 1e-8


@pytest.mark.parametrize("b", [1.0, 0.0, -1.0])
def test_int_psi_matches_simpson(b):
    for u, v in UV_GRID:
        inp = RiccatiInputs(u, v, b, 0.5)
        assert int_psi_uv(inp, 0.0) == 0.0
        for t in T_GRID:
            ref = adaptive_simpson(lambda s: psi_uv(inp, s), 0.0, t)
            assert abs(int_psi_uv(inp, t) - ref) < 1e-8


def test_int_psi_examples():
    assert int_psi_uv(RiccatiInputs(-1.0, 0.0, 0.0, math.sqrt(2)), 1.0) == pytest.approx(-math.log(2), abs=1e-15)
    assert int_psi_uv(RiccatiInputs(0.0, 0.0, -2.0, 1.0), 40.0) == 0.0
    inp = RiccatiInputs(-1.0, 0.0, 0.0, math.sqrt(2))
    ref = composite_simpson(lambda s: psi_uv(inp, s), 0.0, 1.0)
    assert abs(int_psi_uv(inp, 1.0) - ref) < 1e-10


def test_no_overflow_at_long_horizons():
    for b in (1.0, 0.0, -1.0):
        for u in (0.0, -1.0):
            inp = RiccatiInputs(u, -10.0, b, 0.5)
            p, q = psi_uv(inp, 1e4), int_psi_uv(inp, 1e4)
            assert math.isfinite(p) and math.isfinite(q) and p <= 0 and q <= 0
    inp = RiccatiInputs(-1.0, 0.0, -1.0, 0.5)
    assert math.isfinite(int_psi_uv(inp, 1e4)) and math.isfinite(psi_uv(inp, 1e4))
    assert math.isfinite(psi_u0(-1.0, 1e4, -1.0, 0.5))


def test_psi_nonpositive_and_branch_limits():
    for b in (1.0, 0.0, -1.0):
        for u, v in UV_GRID:
            assert all(psi_uv(RiccatiInputs(u, v, b, 0.5), t) <= 0 for t in T_GRID)
    # v -> 0- approaches the v = 0 branch; for b > 0 and long t the v = 0 value
    # decays like exp(-bt) while the perturbed one tends to v / b, so compare at t <= 1
    for b in (1.0, 0.0, -1.0):
        for t in (0.1, 0.5, 1.0):
            near = psi_uv(RiccatiInputs(-1.0, -1e-8, b, 0.5), t)
            at = psi_uv(RiccatiInputs(-1.0, 0.0, b, 0.5), t)
            assert abs(near - at) < 1e-6 * abs(at)
    # b -> 0 in the marginal formula approaches the b = 0 formula
    for t in (0.5, 5.0):
        at = psi_u0(-1.0, t, 0.0, 0.5)
        for eps in (1e-7, -1e-7):
            assert abs(psi_u0(-1.0, t, eps, 0.5) - at) <= 1e-6 * abs(at)


def test_simplified_psi_agree_with_general():
    for b in (1.0, 0.0, -1.0, 1e-9):
        for t in T_GRID:
            assert psi_u0(-1.3, t, b, 0.5) == pytest.approx(psi_uv(RiccatiInputs(-1.3, 0.0, b, 0.5), t),
                                                            rel=1e-12, abs=1e-300)
            assert psi_0v(-0.7, t, b, 0.5) == pytest.approx(psi_uv(RiccatiInputs(0.0, -0.7, b, 0.5), t),
                                                            rel=1e-12, abs=1e-300)


def test_immigration_closed_forms():
    for levy in (ZeroLevy(), bajd(1.0, 2.0), CompoundPoisson(1.0, Constant(1.0)),
                 CompoundPoisson(2.0, Gamma(1.5, 3.0))):
        assert immigration_integrand(levy, 0.0) == 0.0
    assert immigration_integrand(bajd(1.0, 2.0), -2.0) == -0.5
    assert immigration_integrand(CompoundPoisson(1.0, Constant(1.0)), -1.0) == pytest.approx(math.exp(-1) - 1)
    # quadrature of (e^{z psi} - 1) against the exponential measure on [0, 50/lam]
    c, lam, psi = 1.0, 2.0, -2.0
    ref = adaptive_simpson(lambda z: math.expm1(z * psi) * c * lam * math.exp(-lam * z), 0.0, 50 / lam)
    assert abs(ref - (-0.5)) < 1e-9
    # Gamma against quadrature of its density
    k, th, psi = 1.5, 3.0, -0.8
    dens = lambda z: th**k * z ** (k - 1) * math.exp(-th * z) / math.gamma(k)  # noqa: E731
    # substitute z = s^2 to remove the square-root singularity at 0
    ref = composite_simpson(lambda s: 2 * s * math.expm1(s * s * psi) * 2.0 * dens(s * s), 0.0, 7.0, n=20000)
    assert abs(immigration_integrand(CompoundPoisson(2.0, Gamma(k, th)), psi) - ref) < 1e-6


def test_joint_laplace_frozen_values(bajd_crit, bajd_super, bajd_sub):
    assert joint_laplace(bajd_crit, -1.0, -1.0, 1.0) == pytest.approx(MP_BAJD_CRIT_JOINT, rel=1e-12)
    assert joint_laplace(bajd_crit, -1.0, -1.0, 1.0, method="quadrature") == pytest.approx(
        MP_BAJD_CRIT_JOINT, rel=1e-10)
    assert marginal_laplace_y(bajd_super, -1.0, 1.0) == pytest.approx(MP_BAJD_SUPER_MARG, rel=1e-12)
    const = bajd_sub.replace(levy=CompoundPoisson(1.0, Constant(0.7)))
    assert joint_laplace(const, -0.5, -0.3, 2.0) == pytest.approx(MP_CONST_SUB_JOINT, rel=1e-10)
    assert joint_laplace(bajd_sub.replace(levy=ZeroLevy()), -1.0, -1.0, 1.0) == pytest.approx(
        MP_ZERO_SUB_JOINT, rel=1e-12)


def test_joint_laplace_trivia(bajd_sub):
    assert joint_laplace(bajd_sub, 0.0, 0.0, 3.0) == 1.0
    with pytest.raises(DomainError):
        joint_laplace(bajd_sub, 0.1, 0.0, 1.0)
    with pytest.raises(DomainError):
        joint_laplace(bajd_sub, 0.0, 0.1, 1.0)


def test_bajd_critical_branches():
    kw = dict(a=1.0, sigma=0.5, c=1.0, lam=2.0)
    assert bajd_critical_phi(0.0, 0.0, 2.0, **kw) == 0.0
    got = bajd_critical_phi(-1.0, 0.0, 1.0, a=1.0, sigma=1.0, c=1.0, lam=2.0)
    assert got == pytest.approx(-2 * math.log(1.5) - math.log(1 + 1 / 3), abs=1e-15)
    with pytest.raises(NotCritical):
        bajd_critical_phi(-1.0, -1.0, 1.0, b=0.5, **kw)
    p = ModelParams(1.0, 0.0, 0.5, bajd(1.0, 2.0), 1.0)
    s2, lam = 0.25, 2.0
    cases = [(-1.0, -1.0), (-1.0, 0.0), (-0.3, -2.0), (-1.0, -s2 * lam**2 / 2), (-2.0, -s2 * 4 / 2), (0.0, -1.0)]
    for u, v in cases:
        for t in (0.5, 1.0, 5.0):
            closed = bajd_critical_phi(u, v, t, **kw)
            inp = RiccatiInputs(u, v, 0.0, 0.5)
            quad = log_joint_laplace(p, u, v, t, method="quadrature") - psi_uv(inp, t) * p.y0
            assert abs(closed - quad) < 1e-8, (u, v, t)


def test_bajd_supercritical_branches(bajd_super):
    kw = dict(a=1.0, b=-1.0, sigma=0.5, c=1.0, lam=2.0)
    assert bajd_supercritical_phi(0.0, 3.0, **kw) == 0.0
    with pytest.raises(NotSupercritical):
        bajd_supercritical_phi(-1.0, 1.0, a=1.0, b=0.0, sigma=0.5, c=1.0, lam=2.0)
    crit_u = 2 * -1.0 / 0.25
    for u in (-1.0, -0.3, crit_u, -5.0):
        for t in (0.5, 1.0, 5.0):
            closed = bajd_supercritical_phi(u, t, **kw)
            quad = math.log(marginal_laplace_y(bajd_super, u, t, method="quadrature")) - psi_u0(u, t, -1.0, 0.5)
            assert abs(closed - quad) < 1e-8, (u, t)
    # the degenerate branch is linear in t with the displayed slope
    slope = 2 * -1.0 * (2 * 1 * -1.0 - 1 * 0.25 - 1 * 0.25 * 2) / (0.25 * (-0.25 * 2 + 2 * -1.0))
    assert bajd_supercritical_phi(crit_u, 3.0, **kw) == pytest.approx(3 * slope, rel=1e-14)
    assert math.isfinite(bajd_supercritical_phi(-1.0, 1e4, **kw))


def test_marginals_consistent_with_joint(bajd_crit, bajd_sub, bajd_super):
    for p in (bajd_crit, bajd_sub, bajd_super):
        for t in (0.5, 2.0):
            assert marginal_laplace_y(p, 0.0, t) == 1.0
            assert marginal_laplace_int_y(p, 0.0, t) == 1.0
            assert abs(marginal_laplace_y(p, -0.8, t) - joint_laplace(p, -0.8, 0.0, t)) < 1e-12
            assert abs(marginal_laplace_int_y(p, -0.8, t) - joint_laplace(p, 0.0, -0.8, t)) < 1e-12


def test_monotone_and_in_unit_interval(bajd_sub, bajd_super):
    for p in (bajd_sub, bajd_super):
        us = [0.0, -0.1, -0.5, -1.0, -3.0]
        vals = [joint_laplace(p, u, -0.5, 1.0) for u in us]
        assert all(0 < x <= 1 for x in vals) and np.all(np.diff(vals) <= 0)
        vals = [joint_laplace(p, -0.5, v, 1.0) for v in us]
        assert all(0 < x <= 1 for x in vals) and np.all(np.diff(vals) <= 0)


def test_critical_limit_laplace():
    assert critical_limit_laplace(0.0, 0.0, a=1.0, sigma=1.0) == 1.0
    assert critical_limit_laplace(-1.0, 0.0, a=1.0, sigma=1.0) == pytest.approx(4 / 9, rel=1e-14)
    assert critical_limit_laplace(-1.0, -1.0, a=1.0, sigma=0.5, levy=bajd(1.0, 2.0)) == pytest.approx(
        MP_CRIT_LIMIT, rel=1e-13)


def test_v_laplace(bajd_super):
    assert supercritical_v_laplace(0.0, bajd_super) == 1.0
    assert supercritical_v_laplace(-1.0, bajd_super) == pytest.approx(MP_V_LAPLACE, rel=1e-10)
    zero = bajd_super.replace(levy=ZeroLevy())
    k = 0.25 * -1.0 / (2 * -1.0)
    exact = math.exp(-1.0 * 1.0 / (1 + k)) * (1 + k) ** (-2 * 1.0 / 0.25)
    assert supercritical_v_laplace(-1.0, zero) == pytest.approx(exact, rel=1e-15)
    # limit of the marginal transform of exp(bT) Y_T
    T = 40.0
    assert supercritical_v_laplace(-0.4, bajd_super) == pytest.approx(
        marginal_laplace_y(bajd_super, -0.4 * math.exp(-T), T), rel=1e-10)
    with pytest.raises(NotSupercritical):
        supercritical_v_laplace(-1.0, bajd_super.replace(b=0.0))


def test_stationary_laplace(bajd_sub):
    assert stationary_laplace(0.0, bajd_sub) == 1.0
    assert stationary_laplace(-1.0, bajd_sub) == pytest.approx(MP_STATIONARY, rel=1e-12)
    # the diffusion case is a gamma law with shape 2a/sigma^2 and rate 2b/sigma^2
    zero = bajd_sub.replace(levy=ZeroLevy())
    assert stationary_laplace(-1.0, zero) == pytest.approx((1 + 0.25 / 2) ** (-8.0), rel=1e-12)
    h = 1e-7
    deriv = (math.log(stationary_laplace(-h, bajd_sub)) - math.log(stationary_laplace(-2 * h, bajd_sub))) / h
    assert abs(deriv - stationary_mean(bajd_sub)) < 1e-4
    with pytest.raises(NotSubcritical):
        stationary_laplace(-1.0, bajd_sub.replace(b=0.0))


def test_method_switches(bajd_sub):
    gamma_p = bajd_sub.replace(levy=CompoundPoisson(1.0, Gamma(2.0, 3.0)))
    with pytest.raises(Exception):
        joint_laplace(gamma_p, -1.0, -1.0, 1.0, method="closed")
    with pytest.raises(ValueError):
        joint_laplace(bajd_sub, -1.0, -1.0, 1.0, method="magic")
    assert joint_laplace(bajd_sub.replace(levy=CompoundPoisson(1.0, Exponential(2.0))), -1, -1, 1) == \
        joint_laplace(bajd_sub, -1, -1, 1)
