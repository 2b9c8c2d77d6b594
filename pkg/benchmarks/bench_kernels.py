"""Compare the compiled and NumPy outage kernels.

    python benchmarks/bench_kernels.py [--repeat 20]

Prints per-call times for synthetic blocks of several sizes, checks that
both backends return identical arrays, and times a short end-to-end
Monte Carlo run with each backend patched in.
"""

import argparse
import time

import numpy as np

from dosched import montecarlo
from dosched.config import NetworkConfig, SchedulerKind
from dosched.kernels import _fallback

try:
    from dosched.kernels import _ckernels
except ImportError:
    _ckernels = None


def synthetic_block(trials, mean_interferers, seed=0):
    rng = np.random.default_rng(seed)
    counts = rng.poisson(mean_interferers, trials)
    offsets = np.zeros(trials + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    r2 = rng.uniform(1.0, 160.0 ** 2, offsets[-1])
    gains = rng.exponential(1.0, offsets[-1]) * r2 ** -2.0
    signal = rng.exponential(1.0, trials) * 8.0 ** -4.0
    return gains, offsets, signal


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--trials", type=int, default=2000, help="trials for the end-to-end timing")
    args = ap.parse_args(argv)

    if _ckernels is None:
        print("compiled extension not built; only the fallback is timed")
    print(f"{'block':>20} {'python ms':>10} {'cython ms':>10} {'speedup':>8} identical")
    for trials, mean in [(256, 8), (256, 80), (256, 800), (256, 8000)]:
        g, o, s = synthetic_block(trials, mean)
        tp = best_of(lambda: _fallback.outage_block(g, o, s, 2.0), args.repeat)
        if _ckernels is None:
            print(f"{trials:>6} x {mean:>6}/trial {tp * 1e3:10.3f}")
            continue
        tc = best_of(lambda: _ckernels.outage_block(g, o, s, 2.0), args.repeat)
        a = _fallback.outage_block(g, o, s, 2.0)
        b = _ckernels.outage_block(g, o, s, 2.0)
        same = all(np.array_equal(x, y) for x, y in zip(a, b))
        print(f"{trials:>6} x {mean:>6}/trial {tp * 1e3:10.3f} {tc * 1e3:10.3f} {tp / tc:8.1f} {same}")

    for cfg, kind in [(NetworkConfig(lambda_t=1e-3), SchedulerKind.dcas(1.0, 1.0)),
                      (NetworkConfig(lambda_t=1e-2), SchedulerKind.none())]:
        end_to_end(cfg, kind, args.trials)


def end_to_end(cfg, kind, trials):
    settings = montecarlo.McSettings(trials=trials, master_seed=1, window_radius=160.0, threads=1)
    impls = [("python", _fallback.outage_block)]
    if _ckernels is not None:
        impls.append(("cython", _ckernels.outage_block))
    saved = montecarlo.outage_block
    # warm the density solver cache and the allocator before timing
    montecarlo.simulate_trials(cfg, kind, settings.with_(trials=100))
    results = {}
    print(f"end-to-end {kind.label()} at lambda_t={cfg.lambda_t:g}")
    try:
        for name, fn in impls:
            montecarlo.outage_block = fn
            t0 = time.perf_counter()
            res = montecarlo.simulate_trials(cfg, kind, settings)
            dt = time.perf_counter() - t0
            results[name] = res
            print(f"  {name:>6}: {trials} trials in {dt:.2f} s, outage {res.outage.mean():.4f}")
    finally:
        montecarlo.outage_block = saved
    if len(results) == 2:
        same = np.array_equal(results["python"].interference, results["cython"].interference)
        print(f"  interference identical across backends: {same}")

if __name__ == "__main__":
    main()
