"""Command-line entry point.

Exit codes
----------
0  success
1  a validation property failed
2  usage, schema or domain error
3  numeric failure (non-convergence, bracketing, broken internal contract)

Errors are reported on stderr as one JSON object
``{"error": ..., "message": ..., "exit_code": ..., "problems": [...]}``.
"""

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from .analysis import invert_outage_for_density, scheme_outage_bounds
from .config import NetworkConfig, SchedulerKind, ThresholdPolicy
from .errors import DoschedError, NumericError, ParameterError, SpecValidationError
from .experiments import (
    emit_metadata,
    emit_plot_script,
    emit_results,
    list_presets,
    load_preset,
    load_spec,
)
from .montecarlo import THREADS_ENV
from .solvers import solve_active_density
from .validation import RANDOMIZED_SUITES, SUITES, run_suite

EXIT_OK = 0
EXIT_PROPERTY = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _fmt(x):
    return format(x, ".12g")


def _report(exc, code, problems=None):
    err = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    if problems:
        err["problems"] = list(problems)
    print(json.dumps(err), file=sys.stderr)
    return code


def _seed(text):
    if text == "spec":
        return text
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("--seed takes an integer or 'spec'") from None


def _add_network_flags(p):
    p.add_argument("--scheme", choices=["none", "dcas", "dias", "dicas"], default="none")
    p.add_argument("--alpha", type=float, default=4.0)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--distance", type=float, default=8.0, help="constant link distance d (m)")
    p.add_argument("--rho-c", type=float, default=None, help="channel threshold scale")
    p.add_argument("--gamma", type=float, default=0.0, help="channel threshold exponent")
    p.add_argument("--rho-i", type=float, default=None, help="interferer threshold scale")
    p.add_argument("--delta", type=float, default=0.0, help="interferer threshold exponent")
    p.add_argument("--dias-law", choices=["reciprocal", "exact"], default="reciprocal")
    p.add_argument("--json", action="store_true", help="machine-readable output")


def build_parser():
    parser = _Parser(prog="dosched", description="Outage and capacity of distributed opportunistic scheduling.")
    parser.add_argument("--version", action="version", version=f"dosched {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run an experiment spec or a preset")
    run.add_argument("spec", help="path to a YAML spec, or a preset name such as fig5 or presets/fig5")
    run.add_argument("--seed", type=_seed, required=True, help="master seed, or 'spec' for the pinned one")
    run.add_argument("--trials", type=int, default=None)
    run.add_argument("--threads", type=int, default=None, help=f"worker threads (else ${THREADS_ENV})")
    run.add_argument("--out", default=".", help="output directory")
    run.add_argument("--json", action="store_true")

    b = sub.add_parser("bounds", help="outage bounds at one density")
    _add_network_flags(b)
    g = b.add_mutually_exclusive_group(required=True)
    g.add_argument("--lambda", dest="lam", type=float, help="active density")
    g.add_argument("--lambda-t", type=float, help="parent density; the active density is solved")
    b.add_argument("--ic", action="store_true", help="bounds with interference cancellation")

    t = sub.add_parser("tc", help="maximum contention density and transmission capacity")
    _add_network_flags(t)
    t.add_argument("--epsilon", type=float, required=True)
    t.add_argument("--rate-b", type=float, default=1.0)

    v = sub.add_parser("validate", help="run a property suite")
    v.add_argument("suite", help=f"one of: {', '.join(SUITES)}")
    v.add_argument("--seed", type=int, default=None, help="required by randomized suites")
    v.add_argument("--json", action="store_true")

    pr = sub.add_parser("presets", help="list the bundled presets")
    pr.add_argument("--json", action="store_true")
    return parser


def _kind(args):
    rho_c = args.rho_c if args.rho_c is not None else 0.0
    rho_i = args.rho_i if args.rho_i is not None else math.inf
    if args.scheme == "none":
        return SchedulerKind.none()
    if args.scheme == "dcas":
        return SchedulerKind.dcas(rho_c, args.gamma)
    if args.scheme == "dias":
        return SchedulerKind.dias(rho_i, args.delta)
    return SchedulerKind.dicas(rho_c, args.gamma, rho_i, args.delta)


def _config(args, **extra):
    return NetworkConfig(alpha=args.alpha, beta=args.beta, distance_law=args.distance, dias_law=args.dias_law, **extra)


def _emit(args, payload, lines):
    if getattr(args, "json", False):
        print(json.dumps(payload))
    else:
        for line in lines:
            print(line)


def cmd_bounds(args):
    kind = _kind(args)
    if args.lam is not None:
        cfg = _config(args)
        lam = args.lam
    else:
        cfg = _config(args, lambda_t=args.lambda_t)
        lam = solve_active_density(kind, cfg).value
    if lam < 0:
        raise ParameterError("density must be >= 0")
    b, p_i = scheme_outage_bounds(kind, lam, cfg, ic=args.ic)
    payload = {"scheme": kind.label(), "active_density": lam, "lower": b.lower, "upper": b.upper,
               "clamped": b.clamped, "p_i": p_i}
    _emit(args, payload, [
        f"scheme         {kind.label()}",
        f"active density {_fmt(lam)}",
        f"lower          {_fmt(b.lower)}",
        f"upper          {_fmt(b.upper)}",
        f"clamped        {b.clamped}",
    ])
    return EXIT_OK


def cmd_tc(args):
    kind = _kind(args)
    cfg = _config(args, epsilon=args.epsilon, rate_b=args.rate_b)
    d = invert_outage_for_density(kind, cfg)
    payload = {"scheme": kind.label(), "epsilon": args.epsilon, "lambda_lower": d.lower, "lambda_upper": d.upper,
               "tc_lower": d.tc_lower, "tc_upper": d.tc_upper,
               "censored_lower": d.censored_lower, "censored_upper": d.censored_upper}
    _emit(args, payload, [
        f"scheme        {kind.label()}",
        f"epsilon       {_fmt(args.epsilon)}",
        f"lambda lower  {_fmt(d.lower)}" + ("  (censored)" if d.censored_lower else ""),
        f"lambda upper  {_fmt(d.upper)}" + ("  (censored)" if d.censored_upper else ""),
        f"tc lower      {_fmt(d.tc_lower)}",
        f"tc upper      {_fmt(d.tc_upper)}",
    ])
    return EXIT_OK


def _load(spec_arg):
    p = Path(spec_arg)
    if p.suffix in (".yaml", ".yml") or p.exists():
        if not p.is_file():
            raise SpecValidationError([f"{spec_arg}: no such file"])
        return load_spec(p)
    return load_preset(spec_arg)


def cmd_run(args):
    from .experiments import run_experiment

    spec = _load(args.spec)
    seed = None if args.seed == "spec" else args.seed
    spec = spec.with_overrides(trials=args.trials, seed=seed, threads=args.threads)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = run_experiment(spec)
    written = []
    if "csv" in spec.outputs:
        written.append(str(emit_results(rows, "csv", out / f"{spec.name}.csv")))
    if "json" in spec.outputs:
        written.append(str(emit_results(rows, "json", out / f"{spec.name}.json")))
    if "plot" in spec.outputs:
        written.append(str(emit_plot_script(rows, out / f"{spec.name}.gp")))
    extra = {"overrides": {"trials": args.trials, "seed": args.seed, "threads": args.threads}}
    written.append(str(emit_metadata(spec, rows, out / f"{spec.name}.meta.json", extra)))
    failed = [r for r in rows if r.failed]
    payload = {"name": spec.name, "rows": len(rows), "failed_rows": len(failed), "files": written}
    _emit(args, payload, [f"{spec.name}: {len(rows)} rows, {len(failed)} failed"] + [f"wrote {w}" for w in written])
    return EXIT_OK


def cmd_validate(args):
    if args.suite not in SUITES:
        raise ParameterError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    if args.suite in RANDOMIZED_SUITES and args.seed is None:
        raise ParameterError(f"suite {args.suite!r} is randomized; pass --seed")
    results = run_suite(args.suite, seed=args.seed)
    ok = all(r.passed for r in results)
    lines = []
    for r in results:
        lines.append(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}")
        if not r.passed:
            lines.append("      params " + json.dumps(r.params, sort_keys=True))
    _emit(args, {"suite": args.suite, "passed": ok, "properties": [r.to_dict() for r in results]}, lines)
    return EXIT_OK if ok else EXIT_PROPERTY


def cmd_presets(args):
    names = list_presets()
    _emit(args, {"presets": names}, names)
    return EXIT_OK


COMMANDS = {"run": cmd_run, "bounds": cmd_bounds, "tc": cmd_tc, "validate": cmd_validate, "presets": cmd_presets}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        return _report(exc, EXIT_USAGE)
    try:
        return COMMANDS[args.verb](args)
    except SpecValidationError as exc:
        return _report(exc, EXIT_USAGE, exc.problems)
    except NumericError as exc:
        return _report(exc, EXIT_NUMERIC)
    except (ParameterError, ValueError) as exc:
        return _report(exc, EXIT_USAGE)
    except DoschedError as exc:
        return _report(exc, EXIT_NUMERIC)
    except OSError as exc:
        return _report(exc, EXIT_USAGE)


if __name__ == "__main__":
    sys.exit(main())
