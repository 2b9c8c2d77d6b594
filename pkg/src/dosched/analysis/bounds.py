"""Outage probability bounds for plain, DCAS, DIAS and DICAS networks, with
and without geometry-based interference cancellation."""

import enum
import math
from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError
from .functionals import a_function, beta_mean_functional, gamma_mean_functional, psi

__all__ = [
    "OutageBounds",
    "IcVariant",
    "critical_a",
    "upper_factor",
    "shot_noise_ccdf_bounds",
    "dcas_outage_bounds",
    "dias_outage_bounds",
    "dicas_outage_bounds",
    "cancelable_intensity",
    "ic_outage_bounds_dicas",
    "ic_outage_bounds_dcas",
    "ic_outage_bounds_dias",
    "a_channel",
]


@dataclass(frozen=True)
class OutageBounds:
    """Lower/upper outage probability pair.

    ``clamped`` marks an upper bound replaced by 1 because the Chebyshev
    factor left its valid range.
    """

    lower: float
    upper: float
    clamped: bool = False

    def __post_init__(self):
        if not (0.0 <= self.lower <= self.upper <= 1.0):
            raise ParameterError(f"invalid outage bounds ({self.lower}, {self.upper})")

    def contains(self, value, slack=0.0):
        return self.lower - slack <= value <= self.upper + slack


class IcVariant(str, enum.Enum):
    """Which form of the cancelable intensity to evaluate.

    BETA: pi*psi and beta*Delta_c.  BETA_TILDE: pi*psi and beta_tilde*Delta_c.
    EXPANDED: the beta^2 expanded integrands inside the mean functionals.
    LAPLACE: psi and beta_tilde*Delta_c, as the PPP Laplace functional gives.
    """

    BETA = "beta"
    BETA_TILDE = "beta_tilde"
    EXPANDED = "expanded"
    LAPLACE = "laplace"


def critical_a(alpha):
    """Smallest A at which ``1 - (alpha-1)A/((alpha-1)-A)^2`` reaches 0."""
    c = alpha - 1.0
    return c * (3.0 - math.sqrt(5.0)) / 2.0


def upper_factor(a_val, alpha):
    """Upper CCDF factor ``1 - (1 - cA/(c-A)^2)^+ e^-A`` with ``c = alpha-1``.

    Returns ``(value, clamped)``; at or beyond :func:`critical_a` the value
    is 1 and ``clamped`` is True.  ``A = inf`` gives ``(1, False)``.
    """
    if math.isinf(a_val):
        return 1.0, False
    if a_val <= 0.0:
        return 0.0, False
    if a_val >= critical_a(alpha):
        return 1.0, True
    c = alpha - 1.0
    u = c * a_val / (c - a_val) ** 2
    # 1 - (1 - u) e^-A, written without cancellation for small A
    return min(1.0, -math.expm1(-a_val) + u * math.exp(-a_val)), False


def _lower_factor(a_val):
    if math.isinf(a_val):
        return 1.0
    return -math.expm1(-a_val)


def shot_noise_ccdf_bounds(x, density, alpha):
    """Bounds on ``P[I >= x]`` for a Poisson shot noise with Rayleigh fades."""
    a_val = a_function(x, density, alpha)
    up, clamped = upper_factor(a_val, alpha)
    return OutageBounds(_lower_factor(a_val), up, clamped)


def a_channel(lam, delta, config, p_i=1.0):
    """``pi Gamma(1+2/alpha) lam beta^(2/alpha) Delta^(-2/alpha) p_i``."""
    k = 2.0 / config.alpha
    if lam == 0.0 or p_i == 0.0 or math.isinf(delta):
        return 0.0
    if delta == 0.0:
        return math.inf
    return math.pi * math.gamma(1.0 + k) * lam * config.beta ** k * delta ** (-k) * p_i


def _b_coeff(config, p_i):
    """Per-node coefficients ``p_i beta^(2/alpha) psi D^2`` and weights."""
    d, w = config.distance_law.nodes()
    k = 2.0 / config.alpha
    return p_i * config.beta ** k * psi(config.alpha) * d * d, w


def _b_term(coef, w, lam_eff):
    """``E[exp(-coef * lam_eff)]`` with ``lam_eff`` scalar or per-node."""
    return float(np.dot(w, np.exp(-coef * lam_eff)))


def _check_channel_policy(policy):
    if not (policy.is_fixed or policy.exponent >= 0):
        raise ParameterError("channel threshold must be nondecreasing in the density (exponent >= 0)")


def _check_pi(p_i):
    if not (0.0 < p_i <= 1.0):
        raise ParameterError(f"p_i must lie in (0, 1], got {p_i}")


def _assemble(a_val, b_val, alpha):
    one_minus_b = 1.0 - b_val
    up, clamped = upper_factor(a_val, alpha)
    return OutageBounds(_lower_factor(a_val) * one_minus_b, up * one_minus_b, clamped)


def dcas_outage_bounds(lambda_c, config, channel_policy):
    """Outage bounds with channel-aware scheduling at active density ``lambda_c``."""
    return dicas_outage_bounds(lambda_c, config, channel_policy, 1.0)


def dicas_outage_bounds(lambda_ic, config, channel_policy, p_i):
    """Outage bounds with both tests; ``p_i = 1`` is the DCAS case."""
    if lambda_ic < 0:
        raise ParameterError("density must be >= 0")
    _check_channel_policy(channel_policy)
    _check_pi(p_i)
    if lambda_ic == 0.0:
        return OutageBounds(0.0, 0.0)
    delta = channel_policy(lambda_ic)
    a_val = a_channel(lambda_ic, delta, config, p_i)
    coef, w = _b_coeff(config, p_i)
    b_val = _b_term(coef, w, lambda_ic)
    return _assemble(a_val, b_val, config.alpha)


def dias_outage_bounds(lambda_i, config, p_i):
    """``1 - exp(-m)`` and ``1 - exp(-2m)`` with
    ``m = lambda_i p_i beta^(2/alpha) psi E[D^2]``."""
    if lambda_i < 0:
        raise ParameterError("density must be >= 0")
    _check_pi(p_i)
    k = 2.0 / config.alpha
    m = lambda_i * p_i * config.beta ** k * psi(config.alpha) * config.distance_law.moment(2.0)
    return OutageBounds(-math.expm1(-m), -math.expm1(-2.0 * m))


def _ratio_expectation(config, r_alpha_scaled):
    """``E[D^alpha / (D^alpha + s)]`` for an array ``s``."""
    a = config.alpha
    law = config.distance_law
    if law.is_constant:
        da = law.d ** a
        return da / (da + r_alpha_scaled)
    d, w = law.nodes()
    da = (d ** a)[:, None]
    return np.tensordot(w, da / (da + np.asarray(r_alpha_scaled)[None, :]), axes=(0, 0))


def cancelable_intensity(r, lambda_ic, config, channel_policy, p_i=1.0, variant=IcVariant.BETA):
    """Intensity of interferers that the reference receiver can cancel.

    ``lam exp(-pi psi bt^(2/alpha) r^2 lam p_i - b' Delta_c r^alpha) E[D^a/(D^a + bt r^a)]``
    with ``bt = beta/(1+beta)`` and ``b' = beta`` (BETA) or ``bt`` (BETA_TILDE,
    LAPLACE).  LAPLACE drops the leading pi of the Gaussian term.  EXPANDED
    evaluates as BETA here; it only differs inside the mean functionals.
    """
    variant = IcVariant(variant)
    r = np.asarray(r, dtype=float)
    scalar = r.ndim == 0
    r = np.atleast_1d(r)
    if np.any(r < 0):
        raise ParameterError("r must be >= 0")
    a, b = config.alpha, config.beta
    bt = b / (1.0 + b)
    k = 2.0 / a
    delta = channel_policy(lambda_ic) if channel_policy is not None else 0.0
    lead = psi(a) if variant is IcVariant.LAPLACE else math.pi * psi(a)
    bdelta = b * delta if variant in (IcVariant.BETA, IcVariant.EXPANDED) else bt * delta
    ra = r ** a
    with np.errstate(invalid="ignore"):
        expo = -lead * bt ** k * r * r * lambda_ic * p_i - np.where(ra == 0.0, 0.0, bdelta * ra)
    out = lambda_ic * np.exp(expo) * _ratio_expectation(config, bt * ra)
    return float(out[0]) if scalar else out


def _ic_hat_terms(lambda_ic, config, delta, p_i, variant):
    """Return ``(G, B_per_node)`` for the cancellation bounds."""
    a, b = config.alpha, config.beta
    bt = b / (1.0 + b)
    k = 2.0 / a
    ps = psi(a)
    lam = lambda_ic
    d_nodes, _ = config.distance_law.nodes()

    if variant is IcVariant.EXPANDED:
        def g_integrand(u):
            return lam * np.exp(-math.pi * ps * (b * b * u / delta) ** k * lam * p_i - b * b * u)

        def b_integrand_for(dj):
            def f(t):
                return lam / (1.0 + bt * b * t) * np.exp(
                    -math.pi * ps * (bt * b * t) ** k * dj * dj * lam * p_i - b * b * delta * dj ** a * t
                )
            return f
    else:
        policy = _Const(delta)

        def g_integrand(u):
            return cancelable_intensity((b * u / delta) ** (1.0 / a), lam, config, policy, p_i, variant)

        def b_integrand_for(dj):
            def f(t):
                return cancelable_intensity(dj * (b * t) ** (1.0 / a), lam, config, policy, p_i, variant)
            return f

    if delta == 0.0 or math.isinf(delta):
        g_val = 0.0
    else:
        g_val = gamma_mean_functional(g_integrand, k)
    b_nodes = np.array([beta_mean_functional(b_integrand_for(dj), k, 1.0 - k) for dj in d_nodes])
    return g_val, b_nodes


class _Const:
    """Threshold stand-in returning a fixed value."""

    def __init__(self, value):
        self.value = value

    def __call__(self, lam):
        return self.value


def ic_outage_bounds_dicas(lambda_ic, config, channel_policy, p_i, variant=IcVariant.BETA):
    """DICAS outage bounds when receivers cancel every interferer in their
    cancellation coverage.

    ``A_hat = A_ic (1 - G(lam^c; 2/alpha)/lam)`` and
    ``B_hat = E[exp(-p_i beta^(2/alpha) psi D^2 (lam - B(lam^c; 2/alpha, 1-2/alpha)))]``.
    """
    variant = IcVariant(variant)
    if lambda_ic < 0:
        raise ParameterError("density must be >= 0")
    _check_channel_policy(channel_policy)
    _check_pi(p_i)
    if lambda_ic == 0.0:
        return OutageBounds(0.0, 0.0)
    delta = channel_policy(lambda_ic)
    a_val = a_channel(lambda_ic, delta, config, p_i)
    g_val, b_nodes = _ic_hat_terms(lambda_ic, config, delta, p_i, variant)
    if math.isinf(a_val) or a_val == 0.0:
        a_hat = a_val
    else:
        a_hat = a_val * (1.0 - min(max(g_val, 0.0), lambda_ic) / lambda_ic)
    coef, w = _b_coeff(config, p_i)
    lam_eff = lambda_ic - np.clip(b_nodes, 0.0, lambda_ic)
    b_hat = _b_term(coef, w, lam_eff)
    return _assemble(a_hat, b_hat, config.alpha)


def ic_outage_bounds_dcas(lambda_c, config, channel_policy, variant=IcVariant.BETA_TILDE):
    """DCAS with cancellation: the DICAS form at ``p_i = 1``."""
    return ic_outage_bounds_dicas(lambda_c, config, channel_policy, 1.0, variant)


def ic_outage_bounds_dias(lambda_i, config, p_i):
    """DIAS with cancellation.

    ``m = lam p_i beta^(2/alpha) psi E[D^2 (1 - B(h; 2/alpha, 1-2/alpha))]`` with
    ``h(t) = exp(-pi psi (bt beta t)^(2/alpha) D^2 lam) / (1 + t bt beta)``;
    returns ``(1 - e^-m, 1 - e^-2m)``.
    """
    if lambda_i < 0:
        raise ParameterError("density must be >= 0")
    _check_pi(p_i)
    a, b = config.alpha, config.beta
    k = 2.0 / a
    bt = b / (1.0 + b)
    ps = psi(a)
    if lambda_i == 0.0:
        return OutageBounds(0.0, 0.0)
    law = config.distance_law
    d, w = law.nodes()
    keep = np.empty(len(d))
    for j, dj in enumerate(d):
        c = math.pi * ps * dj * dj * lambda_i

        def h(t, c=c):
            return np.exp(-c * (bt * b * t) ** k) / (1.0 + t * bt * b)

        keep[j] = 1.0 - min(max(beta_mean_functional(h, k, 1.0 - k), 0.0), 1.0)
    if law.is_constant:
        ed2 = law.d ** 2.0 * keep[0]
    else:
        ed2 = float(np.dot(w, d * d * keep))
    m = lambda_i * p_i * b ** k * ps * ed2
    return OutageBounds(-math.expm1(-m), -math.expm1(-2.0 * m))
