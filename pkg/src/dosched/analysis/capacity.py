"""Maximum contention densities, transmission capacity and the asymptotic
bound ratios."""

import functools
import math
from dataclasses import dataclass

import numpy as np

from ..config import Scheme, ThresholdPolicy
from ..errors import ParameterError
from ..solvers import bisect, scheme_transmission_prob
from .bounds import (
    IcVariant,
    OutageBounds,
    dicas_outage_bounds,
    dias_outage_bounds,
    ic_outage_bounds_dias,
    ic_outage_bounds_dicas,
)

__all__ = [
    "DensityBounds",
    "scheme_outage_bounds",
    "density_bound",
    "invert_outage_for_density",
    "transmission_capacity",
    "asymptotic_ratio",
    "LAMBDA_MAX",
]

LAMBDA_MAX = 1.0
_GRID_POINTS = 512
_REFINE_POINTS = 32
_GRID_DECADES = 15

_NO_THRESHOLD = ThresholdPolicy(0.0)


@dataclass(frozen=True)
class DensityBounds:
    """Bounds on the maximum contention density and the matching TC pair.

    ``lower`` comes from the upper outage bound and ``upper`` from the lower
    one.  A censored side hit ``lam_max`` (or 0) without a crossing.
    """

    lower: float
    upper: float
    tc_lower: float
    tc_upper: float
    censored_lower: bool = False
    censored_upper: bool = False


def transmission_capacity(density, config):
    """``b * density * (1 - epsilon)``."""
    if density < 0:
        raise ParameterError("density must be >= 0")
    return config.rate_b * density * (1.0 - config.epsilon)


def scheme_outage_bounds(kind, lam, config, ic=False, variant=None):
    """Bounds for ``kind`` at active density ``lam``.

    Returns ``(OutageBounds, p_i)``; ``p_i`` is 1 for rules without an
    interferer test.  When the interferer test admits no positive fixed point
    (``p_i = 0``) the density cannot be attained by any parent density; the
    bounds are then reported as ``(1, 1)`` so that inversion never selects it.  With ``ic=True`` the cancellation bounds are used; the
    default variant is BETA_TILDE for DCAS and the plain network and BETA for DICAS.
    """
    tag = kind.tag
    if lam < 0:
        raise ParameterError("density must be >= 0")
    if lam == 0.0:
        return OutageBounds(0.0, 0.0), 1.0
    if tag in (Scheme.NONE, Scheme.DCAS):
        policy = kind.channel_policy or _NO_THRESHOLD
        if ic:
            return ic_outage_bounds_dicas(lam, config, policy, 1.0, variant or IcVariant.BETA_TILDE), 1.0
        return dicas_outage_bounds(lam, config, policy, 1.0), 1.0
    _, _, p_i = scheme_transmission_prob(kind, lam, config)
    if p_i <= 0.0:
        return OutageBounds(1.0, 1.0), 0.0
    if tag is Scheme.DIAS:
        fn = ic_outage_bounds_dias if ic else dias_outage_bounds
        return fn(lam, config, p_i), p_i
    if ic:
        return ic_outage_bounds_dicas(lam, config, kind.channel_policy, p_i, variant or IcVariant.BETA), p_i
    return dicas_outage_bounds(lam, config, kind.channel_policy, p_i), p_i


def _is_fixed(kind):
    return all(p is None or p.is_fixed for p in (kind.channel_policy, kind.interferer_policy))


def _eval(kind, lam, config, ic, variant):
    b, _ = scheme_outage_bounds(kind, lam, config, ic, variant)
    return b.lower, b.upper


@functools.lru_cache(maxsize=256)
def _profile(kind, config, lam_max, ic, variant):
    grid = lam_max * np.logspace(-_GRID_DECADES, 0, _GRID_POINTS)
    lo = np.empty(_GRID_POINTS)
    up = np.empty(_GRID_POINTS)
    for j, lam in enumerate(grid):
        lo[j], up[j] = _eval(kind, float(lam), config, ic, variant)
    return grid, lo, up


def density_bound(selector, kind, config, lam_max=LAMBDA_MAX, ic=False, variant=None):
    """One side of the maximum contention density.

    ``selector="upper"`` returns ``sup{lam : lower_bound(lam) <= eps}``;
    ``selector="lower"`` returns ``sup{lam : upper_bound(lam) <= eps}``.
    Fixed thresholds use bracketing and bisection, otherwise a 512-point log
    grid, two refinement passes and a final bisection.

    Returns
    -------
    (value, censored) : (float, bool)
    """
    if selector not in ("lower", "upper"):
        raise ParameterError("selector must be 'lower' or 'upper'")
    eps = config.epsilon
    side = 0 if selector == "upper" else 1

    def f(lam):
        if lam <= 0.0:
            return -eps
        return _eval(kind, lam, config, ic, variant)[side] - eps

    if f(lam_max) <= 0.0:
        return lam_max, True

    if _is_fixed(kind):
        hi = lam_max
        lo = lam_max
        while f(lo) > 0.0:
            hi = lo
            lo *= 0.1
            if lo < lam_max * 1e-300:
                return 0.0, True
        return bisect(f, (lo, hi), tolerance=1e-14 * lo), False

    key_cfg = config.with_(epsilon=0.5)
    grid, lows, ups = _profile(kind, key_cfg, lam_max, ic, None if variant is None else IcVariant(variant))
    vals = (lows if side == 0 else ups) - eps
    ok = np.nonzero(vals <= 0.0)[0]
    if len(ok) == 0:
        a, b = 0.0, float(grid[0])
    else:
        j = int(ok[-1])
        a, b = float(grid[j]), float(grid[j + 1])
    for _ in range(2):
        if a == 0.0:
            break
        sub = np.exp(np.linspace(math.log(a), math.log(b), _REFINE_POINTS))
        sv = np.array([f(float(x)) for x in sub])
        ok = np.nonzero(sv <= 0.0)[0]
        j = int(ok[-1]) if len(ok) else 0
        a, b = float(sub[j]), float(sub[min(j + 1, len(sub) - 1)])
    if f(a) > 0.0 or f(b) <= 0.0:
        return a, False
    return bisect(f, (a, b), tolerance=1e-14 * b), False


def invert_outage_for_density(kind, config, lam_max=LAMBDA_MAX, ic=False, variant=None):
    """Both sides of the maximum contention density, with TC values."""
    up, cu = density_bound("upper", kind, config, lam_max, ic, variant)
    lo, cl = density_bound("lower", kind, config, lam_max, ic, variant)
    return DensityBounds(
        lower=lo,
        upper=up,
        tc_lower=transmission_capacity(lo, config),
        tc_upper=transmission_capacity(up, config),
        censored_lower=cl,
        censored_upper=cu,
    )


def asymptotic_ratio(scheme, gamma=0.0, delta=0.0, alpha=4.0, regime="sparse"):
    """Closed-form limit of ``upper/lower`` maximum contention density.

    Parameters
    ----------
    scheme : {"dcas", "dias", "dicas"} or Scheme
    gamma, delta : float
        Exponents of the channel and interferer thresholds.
    alpha : float
    regime : {"sparse", "dense"}

    Notes
    -----
    Interval brackets: sparse DCAS uses
    gamma in (0, alpha/2) (gamma = 0 is the fixed-threshold case with the
    same value), dense DCAS gamma in [alpha/2, inf); sparse DIAS
    delta in (2/alpha, inf), dense DIAS delta in (-inf, 2/alpha); DICAS
    sparse needs both delta in (2/alpha, inf) and gamma in (0, alpha/2),
    dense both delta in (-inf, 2/alpha) and gamma in (alpha/2, inf).  A zero
    denominator in an exponent returns ``inf``.
    """
    if not alpha > 2:
        raise ParameterError("alpha must be > 2")
    if regime not in ("sparse", "dense"):
        raise ParameterError("regime must be 'sparse' or 'dense'")
    s = Scheme(scheme)
    r_c = alpha / (alpha - 1.0)

    def power(base, num, den):
        if den == 0.0:
            return math.inf
        return base ** (num / den)

    if s is Scheme.DCAS:
        if regime == "sparse":
            if gamma == 0.0:
                return math.sqrt(r_c)
            if 0.0 < gamma < alpha / 2.0:
                return power(r_c, 1.0, 2.0 - 2.0 * gamma / alpha)
            return 1.0
        if gamma >= alpha / 2.0:
            return power(r_c, alpha, 2.0 * gamma - alpha)
        return 1.0
    if s is Scheme.DIAS:
        in_range = delta > 2.0 / alpha if regime == "sparse" else delta < 2.0 / alpha
        if in_range:
            return power(2.0, alpha - 2.0, alpha * (delta + 1.0) - 4.0)
        return 2.0
    if s is Scheme.DICAS:
        if regime == "sparse":
            if delta > 2.0 / alpha and 0.0 < gamma < alpha / 2.0:
                den = 2.0 * alpha * ((delta - 2.0 / alpha) - (gamma / alpha - 1.0) * (1.0 - 2.0 / alpha))
                return power(r_c, alpha - 2.0, den)
            return 1.0
        if delta < 2.0 / alpha and gamma > alpha / 2.0:
            den = 2.0 * alpha * ((2.0 / alpha - delta) - (1.0 - gamma / alpha) * (1.0 - 2.0 / alpha))
            return power(r_c, alpha - 2.0, den)
        return 1.0
    raise ParameterError("asymptotic ratio is defined for dcas, dias and dicas")
