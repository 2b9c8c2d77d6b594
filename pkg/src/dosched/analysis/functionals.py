"""Radial functionals of (possibly nonhomogeneous) interferer intensities."""

import math

import numpy as np

from ..errors import ParameterError
from ..quadrature import integrate_semi_infinite

__all__ = [
    "psi",
    "a_function",
    "gamma_mean_functional",
    "beta_mean_functional",
    "dominant_coverage_measure",
    "is_constant_intensity",
]


def psi(alpha):
    """Return ``pi * Gamma(1 + 2/alpha) * Gamma(1 - 2/alpha)``.

    Examples
    --------
    >>> round(psi(4.0), 6)
    4.934802
    """
    if not alpha > 2.0:
        raise ParameterError(f"psi requires alpha > 2, got {alpha}")
    if math.isinf(alpha):
        return math.pi
    x = 2.0 / alpha
    return math.pi * math.gamma(1.0 + x) * math.gamma(1.0 - x)


def is_constant_intensity(density):
    return isinstance(density, (int, float, np.floating, np.integer))


def a_function(x, density, alpha, method="auto"):
    """A(x) of the shot-noise CCDF bounds.

    ``(2 pi/alpha) x^(-2/alpha) int_0^inf lam((u/x)^(1/alpha)) u^(2/alpha-1) e^-u du``

    Parameters
    ----------
    x : float
        Interference level, > 0.
    density : float or callable
        Constant intensity, or a vectorised radial intensity ``r -> lam(r)``.
    alpha : float
    method : {"auto", "quadrature"}
        ``"auto"`` uses the closed form ``pi x^(-2/alpha) Gamma(1+2/alpha) lam``
        for a constant density.
    """
    if not x > 0:
        raise ParameterError("a_function requires x > 0")
    if not alpha > 2:
        raise ParameterError("alpha must be > 2")
    k = 2.0 / alpha
    if is_constant_intensity(density):
        lam = float(density)
        if lam < 0:
            raise ParameterError("density must be >= 0")
        if lam == 0.0:
            return 0.0
        if method == "auto":
            return math.pi * x ** (-k) * math.gamma(1.0 + k) * lam
        fn = lambda r: np.full_like(r, lam)  # noqa: E731
    else:
        fn = density
    integral = integrate_semi_infinite(lambda u: fn((u / x) ** (1.0 / alpha)) * u ** (k - 1.0) * np.exp(-u))
    return 2.0 * math.pi / alpha * x ** (-k) * integral


def _identity(u):
    return u


def gamma_mean_functional(intensity_fn, x, transform=None, method="auto"):
    """Gamma mean functional ``(1/Gamma(x)) int lam(T(u)) u^(x-1) e^-u du``.

    A constant intensity ``kappa`` returns ``kappa`` unless
    ``method="quadrature"``.
    """
    if not x > 0:
        raise ParameterError("gamma mean functional needs x > 0")
    transform = transform or _identity
    if is_constant_intensity(intensity_fn):
        kappa = float(intensity_fn)
        if method == "auto" or kappa == 0.0:
            return kappa
        intensity_fn = lambda r: np.full_like(r, kappa)  # noqa: E731
    integral = integrate_semi_infinite(lambda u: intensity_fn(transform(u)) * u ** (x - 1.0) * np.exp(-u))
    return integral / math.gamma(x)


def beta_mean_functional(intensity_fn, x, y, transform=None, method="auto"):
    """Beta mean functional
    ``Gamma(x+y)/(Gamma(x)Gamma(y)) int lam(T(t)) t^(x-1)/(1+t)^(x+y) dt``."""
    if not (x > 0 and y > 0):
        raise ParameterError("beta mean functional needs x, y > 0")
    transform = transform or _identity
    if is_constant_intensity(intensity_fn):
        kappa = float(intensity_fn)
        if method == "auto" or kappa == 0.0:
            return kappa
        intensity_fn = lambda t: np.full_like(t, kappa)  # noqa: E731
    norm = math.gamma(x + y) / (math.gamma(x) * math.gamma(y))
    # log form keeps (1+t)^(x+y) finite at the far nodes
    integral = integrate_semi_infinite(
        lambda t: intensity_fn(transform(t)) * np.exp((x - 1.0) * np.log(t) - (x + y) * np.log1p(t))
    )
    return norm * integral


def dominant_coverage_measure(delta, config):
    """Mean area of the Delta-level dominant interferer coverage.

    ``beta^(2/alpha) psi E[D^2 B(exp(-Delta D^alpha t); 2/alpha, 1-2/alpha)]``;
    ``delta = 0`` returns ``beta^(2/alpha) psi E[D^2]`` in closed form.
    """
    if not delta >= 0:
        raise ParameterError("delta must be >= 0")
    a, b = config.alpha, config.beta
    k = 2.0 / a
    scale = b ** k * psi(a)
    law = config.distance_law
    if delta == 0.0:
        return scale * law.moment(2.0)
    if math.isinf(delta):
        return 0.0
    d, w = law.nodes()
    vals = np.empty(len(d))
    for j, dj in enumerate(d):
        c = delta * dj ** a
        vals[j] = dj * dj * beta_mean_functional(lambda t, c=c: np.exp(-c * t), k, 1.0 - k)
    return scale * float(np.dot(w, vals))

