"""Per-transmitter decision rules and their application to a network sample."""

import math

import numpy as np
from scipy.spatial import cKDTree

from .config import Scheme, SchedulerKind
from .errors import DegenerateConfigError, NoNeighborError, ParameterError
from .geometry import as_generator

__all__ = [
    "dcas_decision",
    "dias_decision",
    "dicas_decision",
    "nearest_unintended_receiver",
    "nearest_unintended_distances",
    "ghost_band_width",
    "apply_scheduler",
]

EDGE_POLICIES = ("mirror", "none")
# below this many query-point pairs a dense distance matrix beats a kd-tree
_BRUTE_MAX = 4096


def dcas_decision(signal_fade, link_distance, threshold, alpha):
    """True iff ``H D^-alpha >= threshold``.  Vectorised."""
    if threshold < 0:
        raise ParameterError("threshold must be >= 0")
    out = np.asarray(signal_fade) * np.asarray(link_distance, dtype=float) ** (-alpha) >= threshold
    return bool(out) if out.ndim == 0 else out


def dias_decision(interferer_fade, nearest_distance, threshold, alpha):
    """True iff ``H~ D~^-alpha <= threshold``.  Vectorised."""
    if threshold < 0:
        raise ParameterError("threshold must be >= 0")
    out = np.asarray(interferer_fade) * np.asarray(nearest_distance, dtype=float) ** (-alpha) <= threshold
    return bool(out) if out.ndim == 0 else out


def dicas_decision(signal_fade, link_distance, interferer_fade, nearest_distance,
                   channel_threshold, interferer_threshold, alpha):
    """Conjunction of the channel and interferer tests."""
    c = dcas_decision(signal_fade, link_distance, channel_threshold, alpha)
    i = dias_decision(interferer_fade, nearest_distance, interferer_threshold, alpha)
    return np.logical_and(c, i) if isinstance(c, np.ndarray) or isinstance(i, np.ndarray) else (c and i)


def nearest_unintended_receiver(sample, tx_index):
    """Nearest receiver of another pair, by brute force.

    Ties go to the lowest pair index.

    Returns
    -------
    (index, distance)
    """
    n = sample.n_pairs
    if n < 2:
        raise NoNeighborError("sample has a single pair")
    if not 0 <= tx_index < n:
        raise ParameterError("tx_index out of range")
    diff = sample.rx - sample.tx[tx_index]
    d2 = np.einsum("ij,ij->i", diff, diff)
    d2[tx_index] = np.inf
    k = int(np.argmin(d2))
    return k, float(math.sqrt(d2[k]))


def ghost_band_width(lambda_t):
    """Expected nearest-neighbour distance ``1/(2 sqrt(lambda_t))``."""
    return 0.5 / math.sqrt(lambda_t) if lambda_t > 0 else math.inf


def nearest_unintended_distances(sample, edge_policy="mirror", subset=None):
    """Distance from every transmitter to its nearest unintended receiver.

    With ``edge_policy="mirror"`` receivers in the outer band
    ``R - 3w < |y| <= R`` (``w`` the expected nearest-neighbour distance) are
    reflected to radius ``2R - |y|`` and rotated by pi, then added as ghosts
    of their pair, so transmitters near the boundary do not see an empty
    exterior.  The rotation matters: a plain radial reflection is always
    farther from every interior point than its source, so it could never be
    a nearest neighbour.  A
    transmitter with no other receiver gets ``inf``.  ``subset`` (index
    array) restricts the queries; other entries are returned as nan.
    """
    if edge_policy not in EDGE_POLICIES:
        raise ParameterError(f"edge_policy must be one of {EDGE_POLICIES}")
    n = sample.n_pairs
    if n < 2:
        return np.full(n, np.inf)
    pts = sample.rx
    owner = np.arange(n)
    if edge_policy == "mirror":
        R = sample.window.radius
        w = ghost_band_width(sample.lambda_t)
        rho = np.hypot(pts[:, 0], pts[:, 1])
        band = np.nonzero((rho > R - 3.0 * w) & (rho <= R) & (rho > 0))[0]
        if len(band):
            # negative scale: reflect across the circle and rotate by pi
            scale = -(2.0 * R - rho[band]) / rho[band]
            pts = np.vstack((pts, pts[band] * scale[:, None]))
            owner = np.concatenate((owner, band))
    q = np.arange(n) if subset is None else np.asarray(subset, dtype=np.intp)
    if len(q) * len(pts) <= _BRUTE_MAX:
        diff = sample.tx[q][:, None, :] - pts[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        d2[owner[None, :] == q[:, None]] = np.inf
        best = np.sqrt(d2.min(axis=1))
    else:
        k = min(3, len(pts))
        dist, idx = cKDTree(pts).query(sample.tx[q], k=k)
        dist = dist.reshape(len(q), k)
        idx = idx.reshape(len(q), k)
        own = owner[idx] == q[:, None]
        best = np.where(own, np.inf, dist).min(axis=1)
    if subset is None:
        return best
    out = np.full(n, np.nan)
    out[q] = best
    return out


def _truncated_exponential(u, c):
    """Inverse CDF of Exp(1) conditioned on ``H <= c``."""
    if math.isinf(c):
        return -math.log1p(-u)
    return -math.log1p(-u * -math.expm1(-c))


def apply_scheduler(sample, kind, active_density, rng_seed, edge_policy="mirror"):
    """Set the active flags of ``sample`` under ``kind``.

    Thresholds are evaluated at ``active_density`` (the solved post-thinning
    density).  The reference pair is conditioned to pass: under a channel
    test its signal fade is redrawn from ``H | H D^-a >= Delta_c``, which by
    memorylessness is ``D^a Delta_c + Exp(1)``; under an interferer test its
    fade toward its nearest unintended receiver is drawn from the truncated
    law ``H | H D~^-a <= Delta_i``.

    Draw order: one exponential for the reference signal (channel test),
    then ``n`` interferer-test fades and one uniform (interferer test).

    Returns
    -------
    NetworkSample
        A copy; the input is left untouched.
    """
    if not isinstance(kind, SchedulerKind):
        raise ParameterError("kind must be a SchedulerKind")
    if kind.tag is Scheme.NONE:
        return sample
    rng = as_generator(rng_seed)
    a = sample.alpha
    ref = sample.reference_pair_index
    n = sample.n_pairs
    active = np.ones(n, dtype=bool)
    fades = sample.signal_fades

    if kind.uses_channel:
        dc = kind.channel_policy(active_density)
        if math.isinf(dc):
            raise DegenerateConfigError("channel threshold is infinite; the reference link cannot be scheduled")
        extra = rng.exponential(1.0)
        fades = fades.copy()
        fades[ref] = sample.link_distances[ref] ** a * dc + extra
        active &= dcas_decision(fades, sample.link_distances, dc, a)

    if kind.uses_interferer:
        di = kind.interferer_policy(active_density)
        if di == 0.0:
            raise DegenerateConfigError("interferer threshold is zero; the reference link cannot be scheduled")
        h = rng.exponential(1.0, n)
        u = rng.random()
        # only transmitters still in the running need the neighbour query
        cand = np.nonzero(active)[0]
        dn = nearest_unintended_distances(sample, edge_policy, subset=cand)
        h[ref] = _truncated_exponential(u, di * dn[ref] ** a)
        active[cand] &= dias_decision(h[cand], dn[cand], di, a)

    active[ref] = True
    return sample.with_(active=active, signal_fades=fades)
