import math

import pytest

from jumpcir.quadrature import QuadratureError, adaptive_simpson


@pytest.mark.parametrize("f, lo, hi, exact", [
    (math.sin, 0.0, math.pi, 2.0),
    (math.exp, -1.0, 2.0, math.e**2 - math.exp(-1)),
    (lambda x: 1.0 / (1.0 + x * x), 0.0, 50.0, math.atan(50.0)),
    (lambda x: x**3, 0.0, 1.0, 0.25),
])
def test_known_integrals(f, lo, hi, exact):
    assert abs(adaptive_simpson(f, lo, hi) - exact) < 1e-10


def test_orientation_and_empty():
    assert adaptive_simpson(math.cos, 1.0, 1.0) == 0.0
    assert adaptive_simpson(math.cos, 1.0, 0.0) == pytest.approx(-math.sin(1.0), abs=1e-12)


def test_nonfinite_integrand_raises():
    with pytest.raises(QuadratureError):
        adaptive_simpson(lambda x: 1.0 / x if x else math.inf, 0.0, 1.0)


def test_depth_cap_terminates():
    # a kink is resolved only up to the depth cap, but the call returns
    val = adaptive_simpson(lambda x: abs(x - 0.3), 0.0, 1.0, tol=1e-14, max_depth=12)
    assert abs(val - (0.045 + 0.245)) < 1e-6
