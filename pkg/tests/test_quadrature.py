import math

import numpy as np
import pytest

from dosched.errors import NumericError
from dosched.quadrature import integrate_semi_infinite, trapezoid_log_grid


@pytest.mark.parametrize("a", [0.3, 0.5, 1.0, 2.5, 6.0])
def test_gamma_integrals(a):
    val = integrate_semi_infinite(lambda u: u ** (a - 1) * np.exp(-u), rtol=1e-12)
    assert val == pytest.approx(math.gamma(a), rel=1e-10)


def test_algebraic_tail():
    assert integrate_semi_infinite(lambda u: 1.0 / (1.0 + u) ** 2) == pytest.approx(1.0, rel=1e-8)


def test_divergent_integral_raises():
    with pytest.raises(NumericError):
        integrate_semi_infinite(lambda u: 1.0 / (1.0 + u))


@pytest.mark.parametrize("k", [0.5, 2.0])
def test_against_log_trapezoid(k):
    f = lambda u: -np.expm1(-0.3 * u ** k) * np.exp(-u)  # noqa: E731
    a = integrate_semi_infinite(f, rtol=1e-12)
    b = trapezoid_log_grid(f)
    assert abs(a - b) < 1e-6
