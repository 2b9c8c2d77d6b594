"""Declarative experiment specs, sweep execution and result emission.

Spec schema (YAML, unknown keys rejected)::

    name: fig5
    config:            # NetworkConfig fields; distance as a number or a law dict
      alpha: 4
      beta: 2
      lambda_t: 1.0e-4
      distance: 8
      epsilon: 0.1
      rate_b: 1
      dias_law: reciprocal  # law used by the analytic columns
    schemes:           # tag plus optional channel / interferer {rho, exponent}
      - {tag: dcas, channel: {rho: 1, exponent: 1}}
    sweep: {variable: epsilon, grid: [0.02, 0.04]}   # lambda_t | epsilon | gamma | delta
    ic: false          # also fill the cancellation columns
    mc:
      trials: 20000    # 0 disables Monte Carlo
      master_seed: 7
      window_radius: null
      edge_policy: mirror
      dias_law: exact  # law used to solve the density that feeds the thresholds
      lambda_grid: [...]   # parent densities for MC calibration of epsilon sweeps
    outputs: [csv, json, plot]

CSV columns (units: densities per m^2, TC in rate per m^2, outage as a
probability; ``nan`` marks a column that does not apply to the row):
see ``COLUMNS``.
"""

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field, fields, replace
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .analysis.capacity import invert_outage_for_density, scheme_outage_bounds
from .config import DistanceLaw, NetworkConfig, SchedulerKind, Scheme, ThresholdPolicy
from .errors import DoschedError, ParameterError, SpecValidationError
from .montecarlo import McEstimate, McSettings, simulate_trials
from .solvers import solve_active_density

__all__ = [
    "ExperimentSpec",
    "MonteCarloSpec",
    "ResultRow",
    "COLUMNS",
    "SWEEP_VARIABLES",
    "spec_from_dict",
    "load_spec",
    "list_presets",
    "load_preset",
    "preset_path",
    "run_experiment",
    "emit_results",
    "load_results",
    "emit_plot_script",
    "emit_metadata",
]

SWEEP_VARIABLES = ("lambda_t", "epsilon", "gamma", "delta")
OUTPUT_KINDS = ("csv", "json", "plot")
SIG_DIGITS = 12

_TOP_KEYS = {"name", "config", "schemes", "sweep", "mc", "outputs", "ic", "description"}
_CONFIG_KEYS = {"alpha", "beta", "lambda_t", "distance", "epsilon", "rate_b", "dias_law"}
_SCHEME_KEYS = {"tag", "channel", "interferer"}
_POLICY_KEYS = {"rho", "exponent"}
_SWEEP_KEYS = {"variable", "grid"}
_MC_KEYS = {"trials", "master_seed", "window_radius", "edge_policy", "dias_law", "lambda_grid", "threads"}


@dataclass(frozen=True)
class MonteCarloSpec:
    trials: int = 20000
    master_seed: int = 0
    window_radius: float | None = None
    edge_policy: str = "mirror"
    dias_law: str = "exact"
    lambda_grid: tuple = ()
    threads: int | None = None

    @property
    def enabled(self):
        return self.trials > 0

    def settings(self):
        return McSettings(
            trials=self.trials,
            window_radius=self.window_radius,
            master_seed=self.master_seed,
            edge_policy=self.edge_policy,
            threads=self.threads,
        )


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    config: NetworkConfig
    schemes: tuple
    sweep_variable: str
    grid: tuple
    mc: MonteCarloSpec = field(default_factory=MonteCarloSpec)
    outputs: tuple = ("csv",)
    ic: bool = False
    description: str = ""

    def with_overrides(self, trials=None, seed=None, threads=None):
        mc = self.mc
        if trials is not None:
            mc = replace(mc, trials=int(trials))
        if seed is not None:
            mc = replace(mc, master_seed=int(seed))
        if threads is not None:
            mc = replace(mc, threads=int(threads))
        return replace(self, mc=mc)


COLUMNS = (
    "sweep_var",
    "sweep_value",
    "scheme",
    "lambda_t",
    "active_density",
    "outage_lower",
    "outage_upper",
    "mc_outage",
    "mc_ci",
    "ic_lower",
    "ic_upper",
    "mc_ic_outage",
    "mc_ic_ci",
    "lambda_lower",
    "lambda_upper",
    "tc_lower",
    "tc_upper",
    "mc_lambda",
    "mc_tc",
    "clamped",
    "censored",
    "violation",
    "failed",
)


@dataclass
class ResultRow:
    """One (grid point, scheme) result.  Non-applicable numbers are nan.

    ``runtime`` (seconds) is kept out of the CSV so that reruns stay
    byte-identical; :func:`emit_metadata` records it.
    """

    sweep_var: str
    sweep_value: float
    scheme: str
    lambda_t: float = math.nan
    active_density: float = math.nan
    outage_lower: float = math.nan
    outage_upper: float = math.nan
    mc_outage: float = math.nan
    mc_ci: float = math.nan
    ic_lower: float = math.nan
    ic_upper: float = math.nan
    mc_ic_outage: float = math.nan
    mc_ic_ci: float = math.nan
    lambda_lower: float = math.nan
    lambda_upper: float = math.nan
    tc_lower: float = math.nan
    tc_upper: float = math.nan
    mc_lambda: float = math.nan
    mc_tc: float = math.nan
    clamped: bool = False
    censored: bool = False
    violation: bool = False
    failed: bool = False
    runtime: float = 0.0
    error: str = ""

    def values(self):
        return [getattr(self, c) for c in COLUMNS]

    def rounded(self):
        """Copy with floats rounded to the emitted precision."""
        out = {}
        for c in COLUMNS:
            v = getattr(self, c)
            out[c] = _round(v) if isinstance(v, float) else v
        return ResultRow(**out)


def _round(x):
    return float(format(x, f".{SIG_DIGITS}g"))


def _fmt(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return format(v, f".{SIG_DIGITS}g")
    return str(v)


# ---------------------------------------------------------------- spec parsing


def _unknown(data, allowed, where, problems):
    for k in data:
        if k not in allowed:
            problems.append(f"{where}: unknown key {k!r}")


def _policy(data, where, problems):
    if data is None:
        return None
    if not isinstance(data, dict):
        problems.append(f"{where}: expected a mapping")
        return None
    _unknown(data, _POLICY_KEYS, where, problems)
    try:
        return ThresholdPolicy(float(data["rho"]), float(data.get("exponent", 0.0)))
    except KeyError:
        problems.append(f"{where}: missing 'rho'")
    except (TypeError, ValueError) as exc:
        problems.append(f"{where}: {exc}")
    return None


def spec_from_dict(data):
    """Validate and build an :class:`ExperimentSpec`; all problems are
    collected into one :class:`SpecValidationError`."""
    problems = []
    if not isinstance(data, dict):
        raise SpecValidationError(["spec must be a mapping"])
    _unknown(data, _TOP_KEYS, "spec", problems)
    name = data.get("name")
    if not isinstance(name, str) or not name:
        problems.append("name: required nonempty string")

    cfg_data = data.get("config") or {}
    config = None
    if not isinstance(cfg_data, dict):
        problems.append("config: expected a mapping")
    else:
        _unknown(cfg_data, _CONFIG_KEYS, "config", problems)
        try:
            kw = {k: float(v) for k, v in cfg_data.items() if k in ("alpha", "beta", "lambda_t", "epsilon", "rate_b")}
            if "distance" in cfg_data:
                kw["distance_law"] = DistanceLaw.from_dict(cfg_data["distance"])
            if "dias_law" in cfg_data:
                kw["dias_law"] = cfg_data["dias_law"]
            config = NetworkConfig(**kw)
        except (TypeError, ValueError, KeyError) as exc:
            problems.append(f"config: {exc}")

    schemes = []
    raw = data.get("schemes")
    if not isinstance(raw, list) or not raw:
        problems.append("schemes: required nonempty list")
        raw = []
    for j, item in enumerate(raw):
        where = f"schemes[{j}]"
        if not isinstance(item, dict):
            problems.append(f"{where}: expected a mapping")
            continue
        _unknown(item, _SCHEME_KEYS, where, problems)
        try:
            schemes.append(
                SchedulerKind(
                    Scheme(item.get("tag")),
                    _policy(item.get("channel"), where + ".channel", problems),
                    _policy(item.get("interferer"), where + ".interferer", problems),
                )
            )
        except (TypeError, ValueError) as exc:
            problems.append(f"{where}: {exc}")

    sweep = data.get("sweep")
    variable, grid = None, ()
    if not isinstance(sweep, dict):
        problems.append("sweep: required mapping with 'variable' and 'grid'")
    else:
        _unknown(sweep, _SWEEP_KEYS, "sweep", problems)
        variable = sweep.get("variable")
        if variable not in SWEEP_VARIABLES:
            problems.append(f"sweep.variable: must be one of {SWEEP_VARIABLES}")
        try:
            grid = tuple(float(x) for x in sweep.get("grid") or ())
        except (TypeError, ValueError):
            problems.append("sweep.grid: must be a list of numbers")
        if not grid:
            problems.append("sweep.grid: must be nonempty")
        elif any(b <= a for a, b in zip(grid, grid[1:])):
            problems.append("sweep.grid: must be strictly increasing")
        if variable == "epsilon" and grid and not all(0 < g < 1 for g in grid):
            problems.append("sweep.grid: epsilon values must lie in (0, 1)")
        if variable in ("gamma", "delta"):
            attr = "channel_policy" if variable == "gamma" else "interferer_policy"
            if any(getattr(k, attr) is None for k in schemes):
                problems.append(f"sweep.variable: every scheme needs a {attr} to sweep {variable}")

    mc_data = data.get("mc") or {}
    mc = MonteCarloSpec()
    if not isinstance(mc_data, dict):
        problems.append("mc: expected a mapping")
    else:
        _unknown(mc_data, _MC_KEYS, "mc", problems)
        try:
            kw = dict(mc_data)
            if "lambda_grid" in kw:
                kw["lambda_grid"] = tuple(float(x) for x in kw["lambda_grid"])
            mc = MonteCarloSpec(**kw)
            if mc.trials and mc.trials < 100:
                problems.append("mc.trials: must be 0 or >= 100")
            if mc.dias_law not in ("reciprocal", "exact"):
                problems.append("mc.dias_law: must be 'reciprocal' or 'exact'")
            if variable == "epsilon" and mc.enabled and not mc.lambda_grid:
                problems.append("mc.lambda_grid: required for epsilon sweeps with Monte Carlo")
        except (TypeError, ValueError) as exc:
            problems.append(f"mc: {exc}")

    outputs = data.get("outputs", ["csv"])
    if not isinstance(outputs, list) or not outputs:
        problems.append("outputs: required nonempty list")
        outputs = []
    for o in outputs:
        if o not in OUTPUT_KINDS:
            problems.append(f"outputs: unknown artifact {o!r}")
    ic = data.get("ic", False)
    if not isinstance(ic, bool):
        problems.append("ic: must be true or false")

    if problems:
        raise SpecValidationError(problems)
    return ExperimentSpec(
        name=name,
        config=config,
        schemes=tuple(schemes),
        sweep_variable=variable,
        grid=grid,
        mc=mc,
        outputs=tuple(outputs),
        ic=ic,
        description=str(data.get("description", "")),
    )


def load_spec(path):
    """Read a YAML spec file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SpecValidationError([f"{path}: {exc.strerror or exc}"]) from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise SpecValidationError([f"{path}: not valid YAML ({exc})"]) from exc
    return spec_from_dict(data)


def list_presets():
    root = resources.files("dosched") / "presets"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".yaml"))


def preset_path(name):
    name = name.split("/")[-1]
    if name.endswith(".yaml"):
        name = name[:-5]
    p = resources.files("dosched") / "presets" / f"{name}.yaml"
    if not p.is_file():
        raise SpecValidationError([f"unknown preset {name!r}; available: {', '.join(list_presets())}"])
    return p


def load_preset(name):
    return spec_from_dict(yaml.safe_load(preset_path(name).read_text()))


# ---------------------------------------------------------------- execution


def _point_config(spec, value):
    cfg = spec.config
    if spec.sweep_variable == "lambda_t":
        return cfg.with_(lambda_t=value)
    if spec.sweep_variable == "epsilon":
        return cfg.with_(epsilon=value)
    return cfg


def _point_kind(kind, variable, value):
    if variable == "gamma":
        return replace(kind, channel_policy=ThresholdPolicy(kind.channel_policy.rho, value))
    if variable == "delta":
        return replace(kind, interferer_policy=ThresholdPolicy(kind.interferer_policy.rho, value))
    return kind


def _fill_analytic(row, kind, cfg, ic):
    lam = solve_active_density(kind, cfg).value
    row.active_density = lam
    b, _ = scheme_outage_bounds(kind, lam, cfg)
    row.outage_lower, row.outage_upper, row.clamped = b.lower, b.upper, b.clamped
    if ic:
        bi, _ = scheme_outage_bounds(kind, lam, cfg, ic=True)
        row.ic_lower, row.ic_upper = bi.lower, bi.upper
        row.clamped = row.clamped or bi.clamped


def _fill_density(row, kind, cfg):
    d = invert_outage_for_density(kind, cfg)
    row.lambda_lower, row.lambda_upper = d.lower, d.upper
    row.tc_lower, row.tc_upper = d.tc_lower, d.tc_upper
    row.censored = row.censored or d.censored_lower or d.censored_upper


def _mc_point(spec, kind, cfg):
    mc_cfg = cfg.with_(dias_law=spec.mc.dias_law)
    lam = solve_active_density(kind, mc_cfg).value
    res = simulate_trials(mc_cfg, kind, spec.mc.settings(), active_density=lam)
    n = res.trials
    return (
        lam,
        McEstimate.from_counts(int(res.outage.sum()), n),
        McEstimate.from_counts(int(res.ic_outage.sum()), n),
    )


def _calibrate(spec, kind):
    """MC outage and active density over ``mc.lambda_grid`` for one scheme.

    The walk stops at the first parent density whose outage exceeds the
    largest epsilon of the sweep; denser grid points cannot change any
    crossing below it unless the outage later drops again, which the
    calibration does not look for.
    """
    eps_max = max(spec.grid)
    parents, lams, qs = [], [], []
    for lt in spec.mc.lambda_grid:
        lam, est, _ = _mc_point(spec, kind, spec.config.with_(lambda_t=lt))
        parents.append(lt)
        lams.append(lam)
        qs.append(est.mean)
        if est.mean > eps_max:
            break
    return np.asarray(parents), np.asarray(lams), np.asarray(qs)


def mc_max_density(parents, actives, outages, eps):
    """Largest active density whose interpolated MC outage is <= ``eps``.

    Outage is interpolated linearly against ``log(lambda_t)`` and the active
    density log-linearly.  Returns ``(density, censored)``; ``censored`` is
    True when the last grid point still meets the constraint.
    """
    logp = np.log(parents)
    best = 0.0
    ok = outages <= eps
    if ok.any():
        best = float(actives[ok].max())
    for j in range(len(parents) - 1):
        q0, q1 = outages[j], outages[j + 1]
        if (q0 <= eps) != (q1 <= eps) and q1 != q0:
            f = (eps - q0) / (q1 - q0)
            a0, a1 = math.log(actives[j]), math.log(actives[j + 1])
            best = max(best, math.exp(a0 + f * (a1 - a0)))
    return best, bool(ok[-1])


def run_experiment(spec, progress=None):
    """Evaluate every (grid point, scheme) pair of ``spec``.

    A failing point yields a row with ``failed=True`` and the error text in
    ``row.error``; the sweep continues.  Rows are ordered by grid index, then
    scheme order.
    """
    rows = []
    calib = {}
    var = spec.sweep_variable
    for value in spec.grid:
        cfg = _point_config(spec, value)
        for kind0 in spec.schemes:
            kind = _point_kind(kind0, var, value)
            t0 = time.perf_counter()
            row = ResultRow(var, float(value), kind.label(), lambda_t=cfg.lambda_t)
            try:
                if var != "epsilon":
                    _fill_analytic(row, kind, cfg, spec.ic)
                _fill_density(row, kind, cfg)
                if spec.mc.enabled:
                    if var == "epsilon":
                        row.lambda_t = math.nan
                        if kind not in calib:
                            calib[kind] = _calibrate(spec, kind)
                        lam, cens = mc_max_density(*calib[kind], value)
                        row.mc_lambda = lam
                        row.mc_tc = cfg.rate_b * lam * (1.0 - value)
                        row.censored = row.censored or cens
                    else:
                        _, est, est_ic = _mc_point(spec, kind, cfg)
                        row.mc_outage, row.mc_ci = est.mean, est.half_width_99
                        row.violation = not est.within(row.outage_lower, row.outage_upper)
                        if spec.ic:
                            row.mc_ic_outage, row.mc_ic_ci = est_ic.mean, est_ic.half_width_99
                            row.violation = row.violation or not est_ic.within(row.ic_lower, row.ic_upper)
            except DoschedError as exc:
                row.failed = True
                row.error = f"{type(exc).__name__}: {exc}"
            row.runtime = time.perf_counter() - t0
            rows.append(row)
            if progress:
                progress(row)
    return rows


# ---------------------------------------------------------------- output


def _csv_text(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([_fmt(v) for v in r.values()])
    return buf.getvalue()


def _json_text(rows):
    data = [{c: (_round(v) if isinstance(v, float) else v) for c, v in zip(COLUMNS, r.values())} for r in rows]
    return json.dumps({"columns": list(COLUMNS), "rows": data}, indent=1, sort_keys=False) + "\n"


def emit_results(rows, fmt, path):
    """Write ``rows`` as CSV or JSON with 12 significant digits."""
    if not rows:
        raise ParameterError("no rows to emit")
    if fmt == "csv":
        text = _csv_text(rows)
    elif fmt == "json":
        text = _json_text(rows)
    else:
        raise ParameterError(f"unknown format {fmt!r}")
    path = Path(path)
    path.write_text(text)
    return path


def load_results(path):
    """Read rows back from a CSV or JSON file written by :func:`emit_results`."""
    path = Path(path)
    types = {f.name: f.type for f in fields(ResultRow)}

    def conv(col, v):
        t = types[col]
        if t in (bool, "bool"):
            return bool(int(v)) if isinstance(v, str) else bool(v)
        if t in (float, "float"):
            return float(v)
        return v

    if path.suffix == ".json":
        data = json.loads(path.read_text())
        return [ResultRow(**{c: conv(c, d[c]) for c in COLUMNS}) for d in data["rows"]]
    with path.open(newline="") as fh:
        return [ResultRow(**{c: conv(c, d[c]) for c in COLUMNS}) for d in csv.DictReader(fh)]


def emit_metadata(spec, rows, path, extra=None):
    """Sidecar JSON echoing the experiment, per-row runtimes and errors."""
    from .kernels import BACKEND

    meta = {
        "name": spec.name,
        "trials": spec.mc.trials,
        "master_seed": spec.mc.master_seed,
        "backend": BACKEND,
        "config": spec.config.to_dict(),
        "schemes": [k.to_dict() for k in spec.schemes],
        "sweep": {"variable": spec.sweep_variable, "grid": list(spec.grid)},
        "rows": [{"scheme": r.scheme, "sweep_value": r.sweep_value, "runtime": r.runtime, "error": r.error} for r in rows],
    }
    if extra:
        meta.update(extra)
    Path(path).write_text(json.dumps(meta, indent=1) + "\n")
    return Path(path)


def emit_plot_script(rows, path):
    """Write a gnuplot script with inline data: one curve per scheme.

    Epsilon sweeps plot TC bounds as a band with the MC-calibrated TC as
    points; other sweeps plot the outage bounds as a band with MC error bars.
    """
    if not rows:
        raise ParameterError("no rows to plot")
    var = rows[0].sweep_var
    schemes = list(dict.fromkeys(r.scheme for r in rows))
    tc = var == "epsilon"
    lines = [
        "# generated by dosched",
        "set datafile missing 'nan'",
        "set key outside right",
        f"set xlabel '{var}'",
        "set ylabel '" + ("transmission capacity" if tc else "outage probability") + "'",
    ]
    if var == "lambda_t":
        lines.append("set logscale x")
    plots = []
    for j, s in enumerate(schemes):
        block = f"$d{j}"
        lines.append(f"{block} << EOD")
        lines.append("# x lower upper mc mc_ci")
        for r in rows:
            if r.scheme != s:
                continue
            if tc:
                vals = (r.sweep_value, r.tc_lower, r.tc_upper, r.mc_tc, 0.0)
            else:
                vals = (r.sweep_value, r.outage_lower, r.outage_upper, r.mc_outage, r.mc_ci)
            lines.append(" ".join(_fmt(float(v)) for v in vals))
        lines.append("EOD")
        title = s.replace("_", "\\\\_")
        plots.append(f"{block} using 1:2:3 with filledcurves fs transparent solid 0.2 lc {j + 1} title '{title} bounds'")
        plots.append(f"{block} using 1:4:5 with yerrorbars lc {j + 1} pt 7 title '{title} MC'")
    lines.append("plot \\\n    " + ", \\\n    ".join(plots))
    Path(path).write_text("\n".join(lines) + "\n")
    return Path(path)
