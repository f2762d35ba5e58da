"""Adaptive Simpson quadrature for smooth one-dimensional integrands."""
from __future__ import annotations

import math
from typing import Callable

from .exceptions import JumpCIRError

TOL = 1e-10
MAX_DEPTH = 40


class QuadratureError(JumpCIRError, ArithmeticError):
    """The integrand returned a non-finite value."""


def adaptive_simpson(f: Callable[[float], float], lo: float, hi: float,
                     tol: float = TOL, max_depth: int = MAX_DEPTH) -> float:
    """Integrate ``f`` over ``[lo, hi]`` to absolute tolerance ``tol``.

    Intervals are bisected until the Richardson error estimate
    ``|S_left + S_right - S_whole| / 15`` falls below the local share of
    ``tol`` or ``max_depth`` is reached. An explicit stack replaces
    recursion so deep refinement cannot exhaust the interpreter stack.
    """
    if lo == hi:
        return 0.0
    if hi < lo:
        return -adaptive_simpson(f, hi, lo, tol, max_depth)

    def ev(x):
        y = float(f(x))
        if not math.isfinite(y):
            raise QuadratureError(f"integrand is not finite at x={x!r}")
        return y

    fa, fm, fb = ev(lo), ev(0.5 * (lo + hi)), ev(hi)
    whole = (hi - lo) * (fa + 4.0 * fm + fb) / 6.0
    parts = []
    stack = [(lo, hi, fa, fm, fb, whole, tol, 0)]
    while stack:
        a, b, fa, fm, fb, whole, eps, depth = stack.pop()
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = ev(lm), ev(rm)
        left = (m - a) * (fa + 4.0 * flm + fm) / 6.0
        right = (b - m) * (fm + 4.0 * frm + fb) / 6.0
        delta = left + right - whole
        if depth >= max_depth or abs(delta) <= 15.0 * eps:
            parts.append(left + right + delta / 15.0)
        else:
            stack.append((m, b, fm, frm, fb, right, 0.5 * eps, depth + 1))
            stack.append((a, m, fa, flm, fm, left, 0.5 * eps, depth + 1))
    return math.fsum(parts)
