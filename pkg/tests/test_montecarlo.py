import math

import numpy as np
import pytest

from dosched.analysis import conditional_weakness_exact, shot_noise_ccdf_bounds
from dosched.config import NetworkConfig, SchedulerKind
from dosched.errors import DegenerateConfigError, ParameterError
from dosched.montecarlo import (
    McEstimate,
    McSettings,
    estimate_conditional_weakness,
    estimate_coverage_area,
    estimate_outage,
    estimate_shot_noise_ccdf,
    simulate_trials,
    thread_count,
)


def test_settings_validation():
    with pytest.raises(ParameterError):
        McSettings(trials=10)
    with pytest.raises(ParameterError):
        McSettings(edge_policy="wrap")
    with pytest.raises(ParameterError):
        thread_count(0)


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("DOSCHED_THREADS", "3")
    assert thread_count() == 3
    assert thread_count(2) == 2


def test_estimate_normal_interval():
    e = McEstimate.from_counts(500, 1000)
    assert e.mean == 0.5
    assert e.half_width_99 == pytest.approx(2.5758293 * math.sqrt(0.25 / 1000), rel=1e-6)
    assert e.within(0.53, 0.6)
    assert not e.within(0.6, 0.7)


def test_estimate_wilson_for_rare_events():
    e = McEstimate.from_counts(0, 1000)
    assert e.mean == 0.0 and e.lo == 0.0
    assert 0 < e.hi < 0.01
    assert e.half_width_99 == pytest.approx(e.hi)
    e3 = McEstimate.from_counts(3, 1000)
    assert e3.lo < 0.003 < e3.hi


@pytest.mark.parametrize("kind", [SchedulerKind.dcas(1.0, 1.0), SchedulerKind.dicas(1.0, 1.0, 1.0, 0.6)],
                         ids=["dcas", "dicas"])
def test_outcomes_independent_of_threads_and_blocks(kind):
    cfg = NetworkConfig(lambda_t=5e-4, dias_law="exact")
    base = McSettings(trials=300, master_seed=11, window_radius=120.0)
    ref = simulate_trials(cfg, kind, base.with_(threads=1))
    for threads, block in ((2, 256), (4, 37)):
        other = simulate_trials(cfg, kind, base.with_(threads=threads, block_size=block))
        np.testing.assert_array_equal(ref.outage, other.outage)
        np.testing.assert_array_equal(ref.ic_outage, other.ic_outage)
        np.testing.assert_array_equal(ref.interference, other.interference)


def test_ic_never_worse_per_trial():
    res = simulate_trials(NetworkConfig(lambda_t=1e-3), SchedulerKind.none(),
                          McSettings(trials=500, master_seed=4, window_radius=120.0))
    assert np.all(res.ic_outage <= res.outage)
    assert np.all(res.residual_interference <= res.interference)
    assert res.ic_outage.sum() < res.outage.sum()


def test_degenerate_scheduler_rejected(cfg):
    with pytest.raises(DegenerateConfigError):
        estimate_outage(cfg, SchedulerKind.dcas(math.inf, 0.0), McSettings(trials=100, master_seed=0),
                        active_density=1e-4)


def test_shot_noise_edge_cases():
    s = McSettings(trials=200, master_seed=1)
    est = estimate_shot_noise_ccdf(0.0, 4.0, [-1.0, 0.0, 1.0], s)
    assert [e.mean for e in est] == [1.0, 0.0, 0.0]
    with pytest.raises(ParameterError):
        estimate_shot_noise_ccdf(1e-4, 2.0, [1.0], s)


def test_shot_noise_inside_bounds():
    s = McSettings(trials=20000, master_seed=2)
    xs = [1e-7, 1e-6, 1e-5]
    est = estimate_shot_noise_ccdf(1e-4, 4.0, xs, s)
    for x, e in zip(xs, est):
        b = shot_noise_ccdf_bounds(x, 1e-4, 4.0)
        assert e.within(b.lower, b.upper)


def test_coverage_area_shared_draws_monotone(cfg):
    s = McSettings(trials=2_000_000, master_seed=3)
    est = estimate_coverage_area([0.0, 1e-5, 1e-4], cfg, s)
    assert est[0].mean >= est[1].mean >= est[2].mean
    assert abs(est[0].mean - 446.647) < est[0].half_width_99


def test_conditional_weakness_estimator(cfg):
    s = McSettings(trials=100_000, master_seed=5)
    est = estimate_conditional_weakness([1e-7, 1e-6], cfg, s)
    for rho, e in zip([1e-7, 1e-6], est):
        assert e.within(*(2 * [conditional_weakness_exact(rho, cfg.lambda_t, cfg.alpha)]))
