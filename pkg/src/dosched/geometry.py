"""Poisson point processes in a disc window and the marked network sample."""

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ParameterError

__all__ = [
    "Window",
    "PointSet",
    "NetworkSample",
    "as_generator",
    "trial_rng",
    "tail_rule_radius",
    "sample_ppp",
    "sample_network",
    "scale_process",
]

# Truncated tail of the interference mean relative to the in-window mean.
TAIL_RTOL = 1e-4


def as_generator(seed):
    """Accept an int seed, a SeedSequence or a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        raise ParameterError("a seed is required; wall-clock seeding is not supported")
    return np.random.default_rng(seed)


def trial_rng(master_seed, trial):
    """Generator for trial ``trial``; the stream depends only on ``(master_seed, trial)``."""
    return np.random.default_rng(np.random.SeedSequence(int(master_seed), spawn_key=(int(trial),)))


@dataclass(frozen=True)
class Window:
    """Disc of radius ``radius`` (meters) centred at the origin."""

    radius: float

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ParameterError(f"window radius must be > 0, got {self.radius}")

    @property
    def area(self):
        return math.pi * self.radius ** 2


def tail_rule_radius(alpha, r_min=1.0, rtol=TAIL_RTOL):
    """Smallest window radius whose truncated interference tail is small.

    The Campbell mean of the interference from ``r_min < |x| < R`` is
    ``2 pi lam (r_min^(2-a) - R^(2-a))/(a-2)`` and the part beyond ``R`` is
    ``2 pi lam R^(2-a)/(a-2)``; the ratio is at most ``rtol`` once
    ``(R/r_min)^(a-2) >= 1 + 1/rtol``.  The density cancels.
    """
    if not alpha > 2:
        raise ParameterError("alpha must be > 2")
    return r_min * (1.0 + 1.0 / rtol) ** (1.0 / (alpha - 2.0))


@dataclass(frozen=True)
class PointSet:
    """Points of a sampled process, shape ``(n, 2)``, with their window."""

    points: np.ndarray
    window: Window

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class NetworkSample:
    """One realisation of the marked pair process.

    Pair 0 is the reference pair, with its receiver at the origin.

    Attributes
    ----------
    tx, rx : ndarray, shape (n, 2)
    link_distances, signal_fades : ndarray, shape (n,)
    active : ndarray of bool, shape (n,)
    window : Window
    alpha : float
    lambda_t : float
        Density the pairs were drawn from; sets the ghost band width.
    reference_pair_index : int
    """

    tx: np.ndarray
    rx: np.ndarray
    link_distances: np.ndarray
    signal_fades: np.ndarray
    active: np.ndarray
    window: Window
    alpha: float
    lambda_t: float
    reference_pair_index: int = 0

    def __post_init__(self):
        n = len(self.tx)
        if not (len(self.rx) == len(self.link_distances) == len(self.signal_fades) == len(self.active) == n):
            raise ParameterError("network sample arrays must share their length")

    @property
    def n_pairs(self):
        return len(self.tx)

    @property
    def tx_positions(self):
        return self.tx

    @property
    def rx_positions(self):
        return self.rx

    @property
    def active_flags(self):
        return self.active

    def with_(self, **changes):
        return replace(self, **changes)


def _uniform_disc(rng, n, radius):
    u = rng.random((n, 2))
    r = radius * np.sqrt(u[:, 0])
    th = 2.0 * math.pi * u[:, 1]
    return np.column_stack((r * np.cos(th), r * np.sin(th)))


def sample_ppp(density, window, rng_seed):
    """Homogeneous PPP of intensity ``density`` in ``window``.

    Draws a Poisson count, then ``rng.random((n, 2))`` for the positions.
    """
    if not (density >= 0 and math.isfinite(density)):
        raise ParameterError(f"density must be >= 0, got {density}")
    rng = as_generator(rng_seed)
    n = int(rng.poisson(density * window.area)) if density > 0 else 0
    return PointSet(_uniform_disc(rng, n, window.radius), window)


def sample_network(config, window, rng_seed):
    """Palm sample of the pair process seen from a receiver at the origin.

    The reference transmitter sits at distance ``D_0`` with a uniform bearing;
    the other transmitters form a PPP of density ``lambda_t`` in the window
    and each gets a receiver at distance ``D_j`` in a uniform direction.
    Fades are unit-mean exponential; every pair starts active.

    Draw order: PPP count and positions, link distances (``n + 1``),
    receiver bearings ``rng.random(n + 1)``, signal fades ``n + 1``.
    """
    rng = as_generator(rng_seed)
    if config.distance_law.hi >= window.radius:
        raise ParameterError("window too small to contain the reference link")
    pts = sample_ppp(config.lambda_t, window, rng).points
    n = len(pts) + 1
    d = np.asarray(config.distance_law.sample(rng, n), dtype=float)
    th = 2.0 * math.pi * rng.random(n)
    fades = rng.exponential(1.0, n)
    offset = np.column_stack((d * np.cos(th), d * np.sin(th)))
    tx = np.empty((n, 2))
    rx = np.empty((n, 2))
    # reference pair: receiver at the origin, transmitter at -offset
    rx[0] = 0.0
    tx[0] = -offset[0]
    tx[1:] = pts
    rx[1:] = pts + offset[1:]
    return NetworkSample(
        tx=tx,
        rx=rx,
        link_distances=d,
        signal_fades=fades,
        active=np.ones(n, dtype=bool),
        window=window,
        alpha=config.alpha,
        lambda_t=config.lambda_t,
    )


def scale_process(points, factor):
    """Multiply every coordinate by ``sqrt(factor)``.

    A homogeneous PPP of density ``lam`` maps to one of density
    ``lam/factor``; the window radius scales with the points.
    """
    if not (factor > 0 and math.isfinite(factor)):
        raise ParameterError(f"scale factor must be > 0, got {factor}")
    if factor == 1:
        return points
    s = math.sqrt(factor)
    return PointSet(np.asarray(points.points) * s, Window(points.window.radius * s))
