"""Conditional weakness of the second-nearest interference link given a weak
nearest link."""

import math

import numpy as np

from ..quadrature import integrate_semi_infinite

__all__ = ["conditional_weakness_closed_form", "conditional_weakness_exact"]

# Gauss-Legendre order for the ratio expectation over v = (D_*/D_j)^2 ~ U(0, 1).
_GL_ORDER = 128


def _laplace_terms(rho, lambda_t, alpha):
    """``E[exp(-rho D^alpha)]`` for the nearest and second-nearest receivers.

    With ``s = pi lam r^2`` the nearest has ``s ~ Exp(1)`` and the second
    nearest ``s ~ Gamma(2, 1)``.
    """
    k = alpha / 2.0
    c = rho * (math.pi * lambda_t) ** (-k)
    e1 = integrate_semi_infinite(lambda s: np.exp(-c * s ** k - s))
    e2 = integrate_semi_infinite(lambda s: s * np.exp(-c * s ** k - s))
    return e1, e2


def _ratio_terms(alpha):
    # Given the second-nearest at s2, the nearest is uniform on (0, s2), so
    # v = s1/s2 ~ U(0,1) independently of s2.
    x, w = np.polynomial.legendre.leggauss(_GL_ORDER)
    v = 0.5 * (x + 1.0)
    k = alpha / 2.0
    r_star = float(0.5 * np.dot(w, v ** k / (v ** k + 1.0)))
    return r_star, 1.0 - r_star


def conditional_weakness_closed_form(rho, lambda_t, alpha):
    """Closed form of ``P[H_j D_j^-a <= rho | H_* D_*^-a <= rho]`` that treats
    the ratio and Laplace terms as independent.

    Evaluated with ``D_*`` the nearest and ``D_j`` the second-nearest
    unintended receiver of a PPP of density ``lambda_t``:
    ``(1 - E[e_*](E[r_j] + E[r_*] E[e_j]/E[e_*])) / (1 - E[e_*])`` with
    ``e = exp(-D^alpha rho)``, ``r_* = D_*^a/(D_*^a + D_j^a)``, ``r_j = 1 - r_*``.
    """
    e1, e2 = _laplace_terms(rho, lambda_t, alpha)
    r_star, r_j = _ratio_terms(alpha)
    num = 1.0 - e1 * (r_j + r_star * e2 / e1)
    return num / (1.0 - e1)


def conditional_weakness_exact(rho, lambda_t, alpha):
    """Same probability computed from the joint law of the two distances,
    ``(1 - E[e_*] - E[e_j] + E[e_* e_j]) / (1 - E[e_*])``."""
    e1, e2 = _laplace_terms(rho, lambda_t, alpha)
    k = alpha / 2.0
    c = rho * (math.pi * lambda_t) ** (-k)
    x, w = np.polynomial.legendre.leggauss(_GL_ORDER)
    v = 0.5 * (x + 1.0)
    w = 0.5 * w

    # E[exp(-c (s1^k + s2^k))] with s2 ~ Gamma(2,1), s1 = v s2
    def inner(s2):
        s2 = np.asarray(s2)[:, None]
        vals = np.exp(-c * (s2 ** k) * (1.0 + v[None, :] ** k))
        return (vals @ w) * s2[:, 0] * np.exp(-s2[:, 0])

    e12 = integrate_semi_infinite(inner)
    return (1.0 - e1 - e2 + e12) / (1.0 - e1)
