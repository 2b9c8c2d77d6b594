"""Monte Carlo estimators used as independent checks of the analytic bounds.

Every trial draws from its own stream ``SeedSequence(master_seed,
spawn_key=(t,))``, so results do not depend on the block size used for
batching or on the number of worker threads.  Vectorised estimators that
batch many draws per stream (shot noise, coverage area, conditional
weakness) key their streams by ``(tag, block)`` with a fixed block size.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from .channel import interferer_gains
from .config import Scheme
from .errors import DegenerateConfigError, ParameterError
from .geometry import Window, sample_network, tail_rule_radius, trial_rng
from .kernels import outage_block
from .schedulers import EDGE_POLICIES, apply_scheduler
from .solvers import solve_active_density

__all__ = [
    "McEstimate",
    "McSettings",
    "TrialOutcomes",
    "simulate_trials",
    "estimate_outage",
    "estimate_outage_with_ic",
    "estimate_shot_noise_ccdf",
    "estimate_coverage_area",
    "estimate_conditional_weakness",
    "thread_count",
    "THREADS_ENV",
]

THREADS_ENV = "DOSCHED_THREADS"
Z99 = float(norm.ppf(0.995))
WILSON_BELOW = 30

# stream tags for the vectorised estimators
_TAG_SHOT = 1
_TAG_AREA = 2
_TAG_WEAK = 3


def thread_count(requested=None):
    """Worker threads: ``requested``, else ``$DOSCHED_THREADS``, else min(4, cpus)."""
    if requested is None:
        env = os.environ.get(THREADS_ENV)
        requested = int(env) if env else min(4, os.cpu_count() or 1)
    if requested < 1:
        raise ParameterError("thread count must be >= 1")
    return int(requested)


@dataclass(frozen=True)
class McEstimate:
    """Binomial proportion with a 99% interval.

    ``half_width_99`` is the normal-approximation half width, or the larger
    distance from ``mean`` to the Wilson limits when fewer than 30 successes
    (or failures) were seen.  ``lo``/``hi`` are the interval limits.
    """

    mean: float
    half_width_99: float
    trials: int
    successes: int = -1
    lo: float = math.nan
    hi: float = math.nan

    def __post_init__(self):
        if self.trials < 0 or not self.half_width_99 >= 0:
            raise ParameterError("invalid Monte Carlo estimate")

    @classmethod
    def from_counts(cls, successes, trials):
        k, n = int(successes), int(trials)
        if n == 0:
            return cls(math.nan, math.inf, 0, 0, 0.0, 1.0)
        p = k / n
        if min(k, n - k) < WILSON_BELOW:
            z2 = Z99 * Z99
            centre = (p + z2 / (2 * n)) / (1 + z2 / n)
            half = Z99 * math.sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n)
            lo, hi = max(0.0, centre - half), min(1.0, centre + half)
            hw = max(p - lo, hi - p)
        else:
            hw = Z99 * math.sqrt(p * (1 - p) / n)
            lo, hi = p - hw, p + hw
        return cls(p, hw, n, k, lo, hi)

    def within(self, lower, upper):
        """True when ``[lower, upper]`` meets ``[mean - hw, mean + hw]``."""
        return lower - self.half_width_99 <= self.mean <= upper + self.half_width_99


@dataclass(frozen=True)
class McSettings:
    """Trial count, window and seeding of a Monte Carlo run.

    ``window_radius=None`` resolves to ``max(60 E[D], tail-rule radius)``.
    """

    trials: int = 20000
    window_radius: float | None = None
    master_seed: int = 0
    edge_policy: str = "mirror"
    block_size: int = 256
    threads: int | None = None

    def __post_init__(self):
        if self.trials < 100:
            raise ParameterError("trials must be >= 100")
        if self.window_radius is not None and not self.window_radius > 0:
            raise ParameterError("window_radius must be > 0")
        if self.edge_policy not in EDGE_POLICIES:
            raise ParameterError(f"edge_policy must be one of {EDGE_POLICIES}")
        if self.block_size < 1:
            raise ParameterError("block_size must be >= 1")

    def window(self, config):
        if self.window_radius is not None:
            return Window(self.window_radius)
        return Window(max(60.0 * config.distance_law.mean(), tail_rule_radius(config.alpha)))

    def with_(self, **changes):
        from dataclasses import replace

        return replace(self, **changes)


@dataclass(frozen=True)
class TrialOutcomes:
    """Per-trial results of :func:`simulate_trials`, in trial order."""

    outage: np.ndarray
    ic_outage: np.ndarray
    signal: np.ndarray
    interference: np.ndarray
    residual_interference: np.ndarray
    n_active: np.ndarray
    active_density: float
    window: Window = field(default=None)

    @property
    def trials(self):
        return len(self.outage)

    def realized_density(self):
        """Mean number of active non-reference transmitters per unit area."""
        return float(np.mean(self.n_active)) / self.window.area


def _blocks(n, size):
    return [(b, min(b + size, n)) for b in range(0, n, size)]


def _run_blocks(fn, blocks, threads):
    threads = thread_count(threads)
    if threads == 1 or len(blocks) == 1:
        return [fn(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, blocks))


def _check_schedulable(kind, lam):
    if kind.uses_channel and math.isinf(kind.channel_policy(lam)):
        raise DegenerateConfigError("channel threshold is infinite; the reference link is never scheduled")
    if kind.uses_interferer and kind.interferer_policy(lam) == 0.0:
        raise DegenerateConfigError("interferer threshold is zero; the reference link is never scheduled")


def simulate_trials(config, kind, settings, active_density=None):
    """Run ``settings.trials`` independent outage trials.

    Per trial: sample the Palm network, apply the scheduler with thresholds at
    the solved active density, draw fresh interference fades for every
    non-reference pair (common random numbers across schemes), and evaluate
    plain and single-pass IC outage at the reference receiver.
    """
    lam = solve_active_density(kind, config).value if active_density is None else float(active_density)
    if kind.tag is not Scheme.NONE:
        _check_schedulable(kind, lam)
    window = settings.window(config)
    beta = config.beta
    ref = 0

    def run(block):
        t0, t1 = block
        m = t1 - t0
        chunks = []
        offsets = np.zeros(m + 1, dtype=np.int64)
        signal = np.empty(m)
        n_active = np.empty(m, dtype=np.int64)
        for i, t in enumerate(range(t0, t1)):
            rng = trial_rng(settings.master_seed, t)
            s = sample_network(config, window, rng)
            s = apply_scheduler(s, kind, lam, rng, settings.edge_policy)
            fades = rng.exponential(1.0, s.n_pairs - 1)
            mask = s.active[1:]
            g = interferer_gains(s, fades[mask])
            chunks.append(g)
            offsets[i + 1] = offsets[i] + len(g)
            signal[i] = s.signal_fades[ref] * s.link_distances[ref] ** (-config.alpha)
            n_active[i] = int(mask.sum())
        gains = np.concatenate(chunks) if chunks else np.empty(0)
        tot, rest, out, out_ic = outage_block(gains, offsets, signal, beta)
        return out, out_ic, signal, tot, rest, n_active

    parts = _run_blocks(run, _blocks(settings.trials, settings.block_size), settings.threads)
    cols = [np.concatenate(c) for c in zip(*parts)]
    return TrialOutcomes(*cols, active_density=lam, window=window)


def estimate_outage(config, kind, settings, active_density=None):
    """Outage probability ``P[SIR < beta]`` at the scheduled reference link."""
    res = simulate_trials(config, kind, settings, active_density)
    return McEstimate.from_counts(int(res.outage.sum()), res.trials)


def estimate_outage_with_ic(config, kind, settings, active_density=None):
    """Outage after removing every interferer that is decodable against the
    full interference (one pass, no successive cancellation)."""
    res = simulate_trials(config, kind, settings, active_density)
    return McEstimate.from_counts(int(res.ic_outage.sum()), res.trials)


def _block_rng(tag, master_seed, block):
    return np.random.default_rng(np.random.SeedSequence(int(master_seed), spawn_key=(tag, int(block))))


def estimate_shot_noise_ccdf(density, alpha, x_grid, settings, n_nearest=2048):
    """Empirical CCDF ``P[I > x]`` of the homogeneous shot noise at the origin.

    Each draw uses the ``n_nearest`` closest points, generated from cumulated
    unit-exponential arrivals (``pi lam r_k^2`` is a unit-rate Poisson
    process), plus the conditional mean of the remainder,
    ``2 pi lam r_K^(2-alpha)/(alpha-2)``.
    """
    if not (density >= 0 and alpha > 2):
        raise ParameterError("need density >= 0 and alpha > 2")
    x = np.asarray(x_grid, dtype=float)
    if density == 0:
        counts = np.zeros(len(x), dtype=np.int64)
        counts[x < 0] = settings.trials
        return [McEstimate.from_counts(int(c), settings.trials) for c in counts]
    k = 0.5 * alpha

    def run(block):
        b0, b1 = block
        rng = _block_rng(_TAG_SHOT, settings.master_seed, b0 // settings.block_size)
        m = b1 - b0
        gam = np.cumsum(rng.exponential(1.0, (m, n_nearest)), axis=1)
        fades = rng.exponential(1.0, (m, n_nearest))
        r2 = gam / (math.pi * density)
        total = np.sum(fades * r2 ** (-k), axis=1)
        total += 2.0 * math.pi * density * r2[:, -1] ** (1.0 - k) / (alpha - 2.0)
        return (total[:, None] > x[None, :]).sum(axis=0)

    parts = _run_blocks(run, _blocks(settings.trials, settings.block_size), settings.threads)
    counts = np.sum(parts, axis=0)
    return [McEstimate.from_counts(int(c), settings.trials) for c in counts]


@dataclass(frozen=True)
class AreaEstimate:
    """Area estimate in m^2 with a 99% half width."""

    mean: float
    half_width_99: float
    samples: int


def estimate_coverage_area(delta, config, settings, samples=None, n_strata=64, radius=None, r_min=None):
    """Mean area of the ``Delta``-level dominant interferer coverage.

    Integrates ``P[H_0 D_0^-a < beta H~ r^-a | H_0 D_0^-a >= Delta]`` over a
    disc with strata uniform in ``log r``; ``H_0`` is drawn from its
    conditioned law ``D_0^a Delta + Exp(1)``.  The disc of radius ``r_min``
    is counted as fully covered.  The interferer fade is integrated out in
    closed form; the radius, link distance and ``H_0`` are sampled.
    ``delta`` may be a sequence: all values
    then share the same draws, which makes the estimates nonincreasing.
    """
    deltas = np.atleast_1d(np.asarray(delta, dtype=float))
    if np.any(deltas < 0):
        raise ParameterError("delta must be >= 0")
    n = int(samples or settings.trials)
    d_mean = config.distance_law.mean()
    radius = radius or 50.0 * d_mean
    r_min = r_min or 1e-3 * d_mean
    per = max(1, n // n_strata)
    edges = np.linspace(math.log(r_min), math.log(radius), n_strata + 1)
    a, beta = config.alpha, config.beta
    chunk = 1 << 16

    def run(stratum):
        lo, hi = edges[stratum], edges[stratum + 1]
        area = math.pi * (math.exp(2 * hi) - math.exp(2 * lo))
        acc = np.zeros(len(deltas))
        acc2 = np.zeros(len(deltas))
        rng = _block_rng(_TAG_AREA, settings.master_seed, stratum)
        done = 0
        while done < per:
            m = min(chunk, per - done)
            # r^2 uniform in the annulus area
            r2 = np.exp(2 * lo) + rng.random(m) * (np.exp(2 * hi) - np.exp(2 * lo))
            d = config.distance_law.sample(rng, m)
            e = rng.exponential(1.0, m)
            # interferer fade integrated out: P[beta h r^-a > x] = exp(-x r^a / beta)
            ra = r2 ** (0.5 * a) / beta
            q = np.exp(-(deltas[:, None] + (e * d ** (-a))[None, :]) * ra[None, :])
            acc += q.sum(axis=1)
            acc2 += (q * q).sum(axis=1)
            done += m
        p = acc / per
        var = np.maximum(acc2 / per - p * p, 0.0)
        return area * p, area * area * var / per
    parts = _run_blocks(lambda s: run(s), list(range(n_strata)), settings.threads)
    mean = math.pi * r_min ** 2 + np.sum([p[0] for p in parts], axis=0)
    var = np.sum([p[1] for p in parts], axis=0)
    out = [AreaEstimate(float(m), float(Z99 * math.sqrt(v)), per * n_strata) for m, v in zip(mean, var)]
    return out[0] if np.ndim(delta) == 0 else out


def estimate_conditional_weakness(rho_star_grid, config, settings):
    """``P[H_j D_j^-a <= rho | H_* D_*^-a <= rho]`` for each ``rho``.

    ``D_*`` is the nearest and ``D_j`` the second-nearest receiver of a PPP
    of density ``lambda_t`` around the transmitter; both come from cumulated
    unit-exponential arrivals.  All ``rho`` share the same draws.
    """
    rho = np.asarray(rho_star_grid, dtype=float)
    if np.any(rho <= 0):
        raise ParameterError("rho values must be > 0")
    lam, a = config.lambda_t, config.alpha
    if not lam > 0:
        raise ParameterError("lambda_t must be > 0")

    def run(block):
        b0, b1 = block
        rng = _block_rng(_TAG_WEAK, settings.master_seed, b0 // settings.block_size)
        m = b1 - b0
        s = np.cumsum(rng.exponential(1.0, (m, 2)), axis=1)
        h = rng.exponential(1.0, (m, 2))
        g = h * (s / (math.pi * lam)) ** (-0.5 * a)
        weak_star = g[:, 0][None, :] <= rho[:, None]
        both = weak_star & (g[:, 1][None, :] <= rho[:, None])
        return weak_star.sum(axis=1), both.sum(axis=1)

    parts = _run_blocks(run, _blocks(settings.trials, settings.block_size), settings.threads)
    cond = np.sum([p[0] for p in parts], axis=0)
    both = np.sum([p[1] for p in parts], axis=0)
    return [McEstimate.from_counts(int(k), int(n)) for k, n in zip(both, cond)]
