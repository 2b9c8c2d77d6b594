"""Transmission probabilities and the post-thinning density fixed point."""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .config import Scheme
from .errors import BracketError, NumericError, ParameterError
from .quadrature import integrate_semi_infinite

__all__ = [
    "FixedPointResult",
    "MultipleRootsWarning",
    "bisect",
    "transmission_prob_dcas",
    "transmission_prob_dias",
    "transmission_prob_dicas",
    "dias_accept_probability",
    "scheme_transmission_prob",
    "solve_active_density",
]

# Quadrature tolerance inside fixed-point maps; tighter than the default so
# level switches in the adaptive rule stay far below the residual tolerance.
_INNER_RTOL = 1e-12

P_TOL = 1e-10
P_COLLAPSE = 1e-30
P_MAX_ITER = 200
OMEGA = 0.5
DENSITY_RTOL = 1e-10


class MultipleRootsWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class FixedPointResult:
    """Outcome of a scalar fixed-point solve.

    Attributes
    ----------
    value : float
    iterations : int
    residual : float
        ``|value - map(value)|`` at return.
    method : str
        ``"iteration"``, ``"bisection"``, ``"scan"`` or ``"exact"``.
    roots : tuple
        All positive roots found when a scan was run.
    """

    value: float
    iterations: int
    residual: float
    method: str = "iteration"
    roots: tuple = ()


def bisect(fn, bracket, tolerance=1e-12, max_iter=400):
    """Root of ``fn`` on ``bracket = (a, b)`` by bisection.

    ``tolerance`` is an absolute bound on the final bracket width.  The
    midpoint of the last bracket is returned, unless an exact zero is hit.
    """
    a, b = float(bracket[0]), float(bracket[1])
    fa, fb = fn(a), fn(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if np.sign(fa) == np.sign(fb):
        raise BracketError(f"no sign change on [{a}, {b}]: f(a)={fa}, f(b)={fb}")
    for _ in range(max_iter):
        m = 0.5 * (a + b)
        if b - a <= tolerance or m == a or m == b:
            return m
        fm = fn(m)
        if fm == 0.0:
            return m
        if np.sign(fm) == np.sign(fa):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def transmission_prob_dcas(lambda_c, config, channel_policy):
    """``P[H D^-alpha >= Delta_c(lambda_c)] = E[exp(-D^alpha Delta_c)]``."""
    if lambda_c < 0:
        raise ParameterError("lambda_c must be >= 0")
    delta = channel_policy(lambda_c)
    return _p_channel(delta, config)


def _p_channel(delta, config):
    if delta == 0.0:
        return 1.0
    if math.isinf(delta):
        return 0.0
    a = config.alpha
    law = config.distance_law
    if law.is_constant:
        return math.exp(-(law.d ** a) * delta)
    return law.expect(lambda d: np.exp(-(d ** a) * delta))


def _dias_exponent(config):
    return 2.0 / config.alpha if config.dias_law == "reciprocal" else config.alpha / 2.0


def dias_accept_probability(delta, parent_density, config, rtol=_INNER_RTOL):
    """Probability that a transmitter passes the interferer test when all
    receivers form a PPP of density ``parent_density``.

    Computes ``1 - int_0^inf exp(-Delta (u/(pi lam))^k - u) du`` with
    ``k = 2/alpha`` (``dias_law="reciprocal"``) or ``k = alpha/2`` (``"exact"``),
    written as ``int (1 - exp(-c u^k)) e^-u du`` to avoid cancellation.
    """
    if delta == 0.0:
        return 0.0
    if math.isinf(delta) or parent_density == 0.0:
        return 1.0
    k = _dias_exponent(config)
    c = delta * (math.pi * parent_density) ** (-k)
    val = integrate_semi_infinite(lambda u: -np.expm1(-c * u ** k) * np.exp(-u), rtol=rtol)
    return min(1.0, max(0.0, val))


def transmission_prob_dias(lambda_i, config, interferer_policy, other_prob=1.0, tol=P_TOL):
    """DIAS transmission probability at active density ``lambda_i``.

    Solves the implicit equation ``p = F(p)`` where ``F(p)`` is the
    acceptance probability with parent density ``lambda_i / p`` (times
    ``other_prob`` under the exact law, which is how DICAS passes p_c).
    Damped iteration from ``p = 1`` with Aitken extrapolation; returns the
    largest fixed point in [0, 1].  ``tol`` bounds the residual relative to
    ``p``.  An iterate below ``P_COLLAPSE`` means only the trivial fixed point
    ``p = 0`` exists: no positive active density ``lambda_i`` is attainable.
    """
    if not lambda_i > 0:
        raise ParameterError("lambda_i must be > 0")
    delta = interferer_policy(lambda_i)
    if delta == 0.0:
        return 0.0
    if math.isinf(delta):
        return 1.0
    scale = other_prob if config.dias_law == "exact" else 1.0

    def fmap(p):
        if p <= 0.0:
            return 0.0
        return dias_accept_probability(delta, lambda_i / (p * scale), config)

    p = 1.0
    hist = []
    resid = math.inf
    for it in range(1, P_MAX_ITER + 1):
        fp = fmap(p)
        resid = abs(fp - p)
        if resid <= tol * fp:
            return fp
        p_next = (1.0 - OMEGA) * p + OMEGA * fp
        hist.append(p_next)
        if len(hist) >= 3:
            x0, x1, x2 = hist[-3:]
            den = x2 - 2.0 * x1 + x0
            if den != 0.0:
                acc = x2 - (x2 - x1) ** 2 / den
                if 0.0 <= acc <= 1.0 and acc <= x2:
                    p_next = acc
                    hist.clear()
        p = p_next
        if p < P_COLLAPSE:
            return 0.0
    # slow convergence near a tangency of F(p) and p: bracket the largest root
    root = _largest_fixed_point(fmap)
    if root is None:
        raise NumericError(f"DIAS transmission probability did not converge (residual {resid:.3e})", residual=resid)
    return root


def _largest_fixed_point(fmap, points=241):
    # h(1) = F(1) - 1 <= 0; walk down a log grid to the first h >= 0
    grid = np.logspace(0.0, math.log10(P_COLLAPSE), points)
    prev = grid[0]
    hp = fmap(prev) - prev
    if hp >= 0.0:
        return prev
    for p in grid[1:]:
        hp = fmap(p) - p
        if hp >= 0.0:
            return bisect(lambda x: fmap(x) - x, (p, prev), tolerance=1e-15 * prev)
        prev = p
    return 0.0


def transmission_prob_dicas(lambda_ic, config, channel_policy, interferer_policy, tol=P_TOL):
    """``p_ic = p_c * p_i`` with both thresholds evaluated at ``lambda_ic``."""
    pc = transmission_prob_dcas(lambda_ic, config, channel_policy)
    if pc == 0.0:
        return 0.0
    pi = transmission_prob_dias(lambda_ic, config, interferer_policy, other_prob=pc, tol=tol)
    return pc * pi


def scheme_transmission_prob(kind, lam, config, tol=P_TOL):
    """Transmission probability of ``kind`` at active density ``lam``.

    Returns ``(p_total, p_c, p_i)``.
    """
    tag = kind.tag
    if tag is Scheme.NONE:
        return 1.0, 1.0, 1.0
    if lam <= 0.0:
        # thresholds at the empty-network limit
        lam = 1e-300
    if tag is Scheme.DCAS:
        pc = transmission_prob_dcas(lam, config, kind.channel_policy)
        return pc, pc, 1.0
    if tag is Scheme.DIAS:
        pi = transmission_prob_dias(lam, config, kind.interferer_policy, tol=tol)
        return pi, 1.0, pi
    pc = transmission_prob_dcas(lam, config, kind.channel_policy)
    pi = 0.0 if pc == 0.0 else transmission_prob_dias(lam, config, kind.interferer_policy, other_prob=pc, tol=tol)
    return pc * pi, pc, pi


def _forward_prob(kind, lam, config):
    """Scheduling probability with the parent density ``lambda_t`` given.

    The DIAS test sees receivers of density ``lambda_t`` (exact law) or
    ``lambda_t p_c`` (reciprocal law), so no inner fixed point is needed.  This
    avoids the branch ambiguity of ``p = F(lam / p)``, whose largest root
    vanishes past the peak of ``x F(x)``.
    """
    lam = max(lam, 1e-300)
    pc = 1.0
    if kind.channel_policy is not None:
        pc = transmission_prob_dcas(lam, config, kind.channel_policy)
        if pc == 0.0:
            return 0.0
    if kind.interferer_policy is None:
        return pc
    parent = config.lambda_t * (pc if config.dias_law == "reciprocal" else 1.0)
    return pc * dias_accept_probability(kind.interferer_policy(lam), parent, config)


def _is_monotone(kind):
    """True when p(lam) is provably nonincreasing in lam."""
    ok = True
    if kind.channel_policy is not None:
        ok &= kind.channel_policy.is_fixed or kind.channel_policy.exponent >= 0
    if kind.interferer_policy is not None:
        ok &= kind.interferer_policy.is_fixed or kind.interferer_policy.exponent <= 0
    return ok


def solve_active_density(kind, config, max_iter=500, scan_points=97):
    """Solve ``lam = lambda_t * p(lam)`` for the scheme's active density.

    ``p(lam)`` is evaluated with the parent density fixed at ``lambda_t``.
    Damped iteration ``lam <- (1-w) lam + w lambda_t p(lam)`` with ``w = 0.5``
    from ``lam = lambda_t``.  If that stalls, or when ``p`` is not provably
    monotone, the sign changes of ``g(lam) = lam - lambda_t p(lam)`` are
    located on a log grid over ``(1e-12 lambda_t, lambda_t]`` and bisected;
    the smallest positive root is returned and a ``MultipleRootsWarning`` is
    issued if there are several.
    """
    lt = config.lambda_t
    if not lt > 0:
        if lt == 0:
            return FixedPointResult(0.0, 0, 0.0, "exact")
        raise ParameterError("lambda_t must be > 0")
    if kind.tag is Scheme.NONE:
        return FixedPointResult(lt, 0, 0.0, "exact")
    def p(lam):
        return _forward_prob(kind, lam, config)

    tol = DENSITY_RTOL * lt

    def g(lam):
        return lam - lt * p(lam)

    if _is_monotone(kind):
        lam = lt
        for it in range(1, max_iter + 1):
            target = lt * p(lam)
            resid = abs(lam - target)
            if resid <= 1e-2 * tol:
                return FixedPointResult(lam, it, resid, "iteration")
            lam = (1.0 - OMEGA) * lam + OMEGA * target
        lam = _bisect_root(g, lt * 1e-300, lt, lt)
        if lam is None:
            raise NumericError("active density fixed point could not be bracketed")
        return FixedPointResult(lam, max_iter, abs(g(lam)), "bisection")

    grid = lt * np.logspace(-12, 0, scan_points)
    vals = np.array([g(x) for x in grid])
    roots = []
    for j in range(len(grid) - 1):
        if vals[j] < 0.0 <= vals[j + 1]:
            r = _bisect_root(g, grid[j], grid[j + 1], lt)
            if r is not None:
                roots.append(r)
    if not roots:
        if vals[0] >= 0.0:
            # g >= 0 down to 1e-12 lambda_t: the only fixed point is the trivial one
            return FixedPointResult(0.0, len(grid), abs(g(0.0)), "scan")
        raise NumericError("active density fixed point could not be bracketed")
    if len(roots) > 1:
        warnings.warn(
            f"{len(roots)} fixed points for {kind.label()} at lambda_t={lt:g}: {roots}; returning the smallest",
            MultipleRootsWarning,
            stacklevel=2,
        )
    lam = roots[0]
    return FixedPointResult(lam, len(grid), abs(g(lam)), "scan", tuple(roots))


def _bisect_root(g, lo, hi, scale):
    glo, ghi = g(lo), g(hi)
    if not (glo < 0.0 <= ghi):
        return None
    return bisect(g, (lo, hi), tolerance=1e-16 * scale)
