"""Compiled inner loops for path propagation.

Every kernel takes a ``numpy.random.Generator`` and draws from it exactly
as the equivalent NumPy calls would, so a path is fully determined by the
generator's seed.
"""
import math

from numba import njit


@njit(cache=True)
def growth_factor(b, dt):
    """(1 - exp(-b dt)) / b, continuous at b = 0."""
    x = b * dt
    if abs(x) < 1e-8:
        return dt * (1.0 - 0.5 * x)
    return -math.expm1(-x) / b


@njit(cache=True)
def cir_draw(rng, y, dt, a, b, sigma):
    """One draw from the exact transition law of the diffusion CIR."""
    if dt <= 0.0:
        return y
    scale = 0.25 * sigma * sigma * growth_factor(b, dt)
    nc = y * math.exp(-b * dt) / scale
    if a > 0.0:
        df = 4.0 * a / (sigma * sigma)
        return scale * rng.noncentral_chisquare(df, nc)
    # a = 0: Poisson mixture of chi-squares with 2N degrees of freedom; 0 absorbs
    if nc <= 0.0:
        return 0.0
    n = rng.poisson(0.5 * nc)
    if n == 0:
        return 0.0
    return scale * 2.0 * rng.standard_gamma(float(n))


@njit(cache=True)
def mean_step_correction(y, dt, a, b):
    """Exact integral of the conditional mean over one step minus its trapezoid.

    Adding this to ``dt * (y_left + y_right) / 2`` gives an estimate of the
    step integral whose conditional expectation is exact.
    """
    x = b * dt
    if abs(x) < 1e-2:
        # Taylor expansions of the two O(dt^3) coefficients
        s = 1.0 / 12.0 - x * (1.0 / 24.0 - x * (1.0 / 80.0 - x * (1.0 / 360.0 - x / 2016.0)))
        return dt**3 * b * s * (a - b * y)
    e = math.exp(-x)
    g = -math.expm1(-x) / b
    cy = g - 0.5 * dt * (1.0 + e)
    ca = (dt - g) / b - 0.5 * dt * g
    return y * cy + a * ca


@njit(cache=True)
def exact_walk(rng, y0, a, b, sigma, times, sizes, values):
    """Propagate exactly along ``times``; ``sizes[i] > 0`` marks a jump at step i.

    A jump step has zero length and adds its size. ``values`` is filled when
    it has the same length as ``times`` (pass an empty array otherwise).

    Returns (y_end, int_left, int_corrected, qv_continuous, jump_total).
    """
    n = times.shape[0]
    store = values.shape[0] == n
    y = y0
    if store:
        values[0] = y
    int_left = 0.0
    int_corr = 0.0
    qv = 0.0
    jsum = 0.0
    for i in range(1, n):
        z = sizes[i]
        if z > 0.0:
            ynew = y + z
            jsum += ynew - y
        else:
            dt = times[i] - times[i - 1]
            ynew = cir_draw(rng, y, dt, a, b, sigma)
            int_left += y * dt
            int_corr += 0.5 * dt * (y + ynew) + mean_step_correction(y, dt, a, b)
            qv += (ynew - y) ** 2
        y = ynew
        if store:
            values[i] = y
    return y, int_left, int_corr, qv, jsum


@njit(cache=True)
def euler_walk(y0, a, b, sigma, times, sizes, dw, values):
    """Full-truncation Euler along ``times`` driven by the increments ``dw``.

    ``dw[i]`` is the Wiener increment over ``(times[i-1], times[i]]``.
    States are floored at zero after each diffusion step; jumps are added
    exactly. Returns (y_end, int_left, qv_continuous, jump_total).
    """
    n = times.shape[0]
    y = y0
    values[0] = y
    int_left = 0.0
    qv = 0.0
    jsum = 0.0
    for i in range(1, n):
        z = sizes[i]
        if z > 0.0:
            ynew = y + z
            jsum += ynew - y
        else:
            dt = times[i] - times[i - 1]
            ynew = y + (a - b * y) * dt + sigma * math.sqrt(max(y, 0.0)) * dw[i]
            if ynew < 0.0:
                ynew = 0.0
            int_left += y * dt
            qv += (ynew - y) ** 2
        y = ynew
        values[i] = y
    return y, int_left, qv, jsum
