"""Named property suites run by ``dosched validate``.

Each suite returns a list of :class:`PropertyResult`.  A failing property
carries the parameters of the first failing instance so it can be rerun.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .analysis import (
    IcVariant,
    asymptotic_ratio,
    dcas_outage_bounds,
    dicas_outage_bounds,
    dias_outage_bounds,
    ic_outage_bounds_dcas,
    ic_outage_bounds_dias,
    ic_outage_bounds_dicas,
    invert_outage_for_density,
    psi,
    scheme_outage_bounds,
    shot_noise_ccdf_bounds,
)
from .config import NetworkConfig, SchedulerKind, ThresholdPolicy
from .errors import ParameterError
from .montecarlo import McSettings, estimate_outage, estimate_shot_noise_ccdf
from .solvers import scheme_transmission_prob, solve_active_density

__all__ = ["PropertyResult", "SUITES", "run_suite", "RANDOMIZED_SUITES"]

REDUCTION_GRID = np.logspace(-6, -2, 20)


@dataclass
class PropertyResult:
    name: str
    passed: bool
    detail: str = ""
    params: dict = field(default_factory=dict)

    def to_dict(self):
        return {"name": self.name, "passed": self.passed, "detail": self.detail, "params": self.params}


def _first_failure(name, cases, check):
    """Run ``check(**case)`` over ``cases``; stop at the first failure.

    ``check`` returns ``(ok, detail)``.
    """
    n = 0
    for case in cases:
        ok, detail = check(**case)
        n += 1
        if not ok:
            return PropertyResult(name, False, detail, {k: _plain(v) for k, v in case.items()})
    return PropertyResult(name, True, f"{n} instances")


def _plain(v):
    if isinstance(v, NetworkConfig):
        return v.to_dict()
    if isinstance(v, SchedulerKind):
        return v.to_dict()
    if isinstance(v, ThresholdPolicy):
        return v.to_dict()
    if isinstance(v, np.floating):
        return float(v)
    return v


# ---------------------------------------------------------------- reductions


def suite_reductions(seed=None):
    cfg = NetworkConfig()
    pol = ThresholdPolicy(1.0, 1.0)
    out = []

    def same_bounds(lam):
        a = dicas_outage_bounds(lam, cfg, pol, 1.0)
        b = dcas_outage_bounds(lam, cfg, pol)
        return a == b, f"dicas {a} dcas {b}"

    out.append(_first_failure("dicas(p_i=1) == dcas", [{"lam": float(x)} for x in REDUCTION_GRID], same_bounds))

    def same_ic(lam, variant):
        a = ic_outage_bounds_dicas(lam, cfg, pol, 1.0, variant)
        b = ic_outage_bounds_dcas(lam, cfg, pol, variant)
        return a == b, f"dicas {a} dcas {b}"

    cases = [{"lam": float(x), "variant": v.value} for x in REDUCTION_GRID for v in (IcVariant.BETA, IcVariant.BETA_TILDE)]
    out.append(_first_failure("ic dicas(p_i=1) == ic dcas", cases, same_ic))

    mu = cfg.distance_law.d ** 2 * cfg.beta ** (2.0 / cfg.alpha) * psi(cfg.alpha)

    def closed_form(lam):
        b = dcas_outage_bounds(lam, cfg, ThresholdPolicy(0.0))
        q = -math.expm1(-lam * mu)
        ok = abs(b.lower - q) <= 1e-12 * q and abs(b.upper - q) <= 1e-12 * q
        return ok, f"bounds {b} closed form {q}"

    out.append(_first_failure("dcas(Delta_c=0) == no scheduling closed form",
                              [{"lam": float(x)} for x in REDUCTION_GRID], closed_form))

    kind = SchedulerKind.dicas(1.0, 1.0, 1.0, 0.6)

    def product(lam, law):
        c = cfg.with_(dias_law=law)
        p, pc, pi = scheme_transmission_prob(kind, lam, c)
        return abs(p - pc * pi) <= 1e-12, f"p_ic {p} p_c*p_i {pc * pi}"

    cases = [{"lam": float(x), "law": law} for x in REDUCTION_GRID for law in ("reciprocal", "exact")]
    out.append(_first_failure("p_ic == p_c * p_i", cases, product))

    k_i = SchedulerKind.dias(0.3, 2.0 / cfg.alpha)
    ref = scheme_transmission_prob(k_i, 1e-4, cfg)[2]

    def constant_pi(lam):
        p = scheme_transmission_prob(k_i, lam, cfg)[2]
        return abs(p - ref) <= 1e-8, f"p_i {p} at lam {lam}, {ref} at 1e-4"

    out.append(_first_failure("p_i constant for Delta_i = rho lam^(2/alpha)",
                              [{"lam": float(x)} for x in REDUCTION_GRID], constant_pi))

    def residual(lambda_t, kind):
        c = cfg.with_(lambda_t=lambda_t)
        r = solve_active_density(kind, c)
        return r.residual < 1e-10 * lambda_t, f"residual {r.residual}"

    kinds = [SchedulerKind.dcas(1.0, 1.0), SchedulerKind.dias(0.015, 0.2), SchedulerKind.dias(0.015, -0.01), kind]
    cases = [{"lambda_t": float(x), "kind": k} for x in np.logspace(-6, -2, 5) for k in kinds]
    out.append(_first_failure("active density residual < 1e-10 lambda_t", cases, residual))
    return out


# ---------------------------------------------------------------- asymptotics

# (label, kind, config, scheme, gamma, delta)
ASYMPTOTIC_CASES = (
    ("dcas sparse gamma=1", SchedulerKind.dcas(1.0, 1.0), NetworkConfig(epsilon=1e-3), "dcas", 1.0, 0.0),
    ("dcas sparse gamma=0", SchedulerKind.dcas(1e-4, 0.0), NetworkConfig(epsilon=1e-3), "dcas", 0.0, 0.0),
    ("dias sparse delta=0.2", SchedulerKind.dias(0.015, 0.2), NetworkConfig(epsilon=1e-3), "dias", 0.0, 0.2),
    ("dias sparse delta=-0.01", SchedulerKind.dias(0.015, -0.01), NetworkConfig(epsilon=1e-3), "dias", 0.0, -0.01),
    ("dias sparse delta=0.6", SchedulerKind.dias(1.0, 0.6), NetworkConfig(epsilon=1e-3), "dias", 0.0, 0.6),
    ("dicas sparse gamma=1 delta=0.6", SchedulerKind.dicas(1.0, 1.0, 1.0, 0.6), NetworkConfig(epsilon=1e-3),
     "dicas", 1.0, 0.6),
)


def asymptotic_check(kind, config, scheme, gamma, delta, rtol=0.10):
    """Compare the numeric density ratio with the closed-form sparse limit."""
    d = invert_outage_for_density(kind, config)
    ratio = d.upper / d.lower
    limit = asymptotic_ratio(scheme, gamma=gamma, delta=delta, alpha=config.alpha, regime="sparse")
    return ratio, limit, abs(ratio / limit - 1.0) <= rtol


def suite_asymptotics(seed=None):
    out = []
    for label, kind, cfg, scheme, g, dl in ASYMPTOTIC_CASES:
        ratio, limit, ok = asymptotic_check(kind, cfg, scheme, g, dl)
        params = {"kind": kind.to_dict(), "config": cfg.to_dict()}
        out.append(PropertyResult(f"density ratio {label}", ok, f"numeric {ratio:.6g} limit {limit:.6g}", params))
    return out


# ---------------------------------------------------------------- ic


def suite_ic(seed=None):
    cfg = NetworkConfig()
    out = []
    grid = np.logspace(-6, -2, 9)
    policies = [ThresholdPolicy(0.0), ThresholdPolicy(1.0, 1.0), ThresholdPolicy(1.0, 2.0)]

    def dominated(lam, policy, p_i, variant):
        pol = ThresholdPolicy(**policy)
        a = dicas_outage_bounds(lam, cfg, pol, p_i)
        b = ic_outage_bounds_dicas(lam, cfg, pol, p_i, variant)
        return b.lower <= a.lower and b.upper <= a.upper, f"ic {b} plain {a}"

    cases = [
        {"lam": float(x), "policy": p.to_dict(), "p_i": pi, "variant": v.value}
        for x in grid for p in policies for pi in (1.0, 0.5) for v in IcVariant
    ]
    out.append(_first_failure("ic bounds <= plain bounds (channel test)", cases, dominated))

    def dominated_dias(lam, p_i):
        a = dias_outage_bounds(lam, cfg, p_i)
        b = ic_outage_bounds_dias(lam, cfg, p_i)
        return b.lower <= a.lower and b.upper <= a.upper, f"ic {b} plain {a}"

    cases = [{"lam": float(x), "p_i": pi} for x in grid for pi in (1.0, 0.5, 0.1)]
    out.append(_first_failure("ic bounds <= plain bounds (interferer test)", cases, dominated_dias))
    return out


# ---------------------------------------------------------------- bounds sandwich

SANDWICH_KINDS = (
    SchedulerKind.none(),
    SchedulerKind.dcas(1.0, 1.0),
    SchedulerKind.dcas(1.0, 2.0),
    SchedulerKind.dias(0.015, 0.2),
    SchedulerKind.dias(0.015, -0.01),
    SchedulerKind.dicas(1.0, 1.0, 1.0, 0.6),
)


def suite_bounds_sandwich(seed, trials=4000):
    if seed is None:
        raise ParameterError("the bounds-sandwich suite is randomized and needs a seed")
    out = []
    x = np.logspace(-9, -5, 8)
    for alpha in (3.0, 4.0):
        settings = McSettings(trials=trials, master_seed=seed)
        est = estimate_shot_noise_ccdf(1e-4, alpha, x * (10.0 if alpha == 3.0 else 1.0), settings)

        def check(j, alpha=alpha, est=est):
            xv = float(x[j] * (10.0 if alpha == 3.0 else 1.0))
            b = shot_noise_ccdf_bounds(xv, 1e-4, alpha)
            return est[j].within(b.lower, b.upper), f"mc {est[j].mean}+-{est[j].half_width_99} bounds {b}"

        out.append(_first_failure(f"shot-noise ccdf sandwich alpha={alpha:g}",
                                  [{"j": j} for j in range(len(x))], check))
    cfg = NetworkConfig(lambda_t=1e-4, dias_law="exact")
    settings = McSettings(trials=trials, master_seed=seed, window_radius=160.0)
    for kind in SANDWICH_KINDS:
        lam = solve_active_density(kind, cfg).value
        b, _ = scheme_outage_bounds(kind, lam, cfg)
        est = estimate_outage(cfg, kind, settings, active_density=lam)
        ok = est.within(b.lower, b.upper)
        params = {"kind": kind.to_dict(), "config": cfg.to_dict(), "trials": trials, "seed": seed,
                  "window_radius": settings.window_radius}
        out.append(PropertyResult(f"outage sandwich {kind.label()}", ok,
                                  f"mc {est.mean}+-{est.half_width_99} bounds [{b.lower}, {b.upper}]", params))
    return out


SUITES = {
    "bounds-sandwich": suite_bounds_sandwich,
    "reductions": suite_reductions,
    "asymptotics": suite_asymptotics,
    "ic": suite_ic,
}
RANDOMIZED_SUITES = frozenset({"bounds-sandwich"})


def run_suite(name, seed=None):
    if name not in SUITES:
        raise ParameterError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return SUITES[name](seed=seed)
