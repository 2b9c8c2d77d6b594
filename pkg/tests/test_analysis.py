import math

import numpy as np
import pytest

from dosched.analysis import (
    IcVariant,
    a_function,
    asymptotic_ratio,
    beta_mean_functional,
    cancelable_intensity,
    critical_a,
    dcas_outage_bounds,
    density_bound,
    dias_outage_bounds,
    dicas_outage_bounds,
    dominant_coverage_measure,
    gamma_mean_functional,
    ic_outage_bounds_dcas,
    ic_outage_bounds_dias,
    ic_outage_bounds_dicas,
    invert_outage_for_density,
    psi,
    scheme_outage_bounds,
    shot_noise_ccdf_bounds,
    transmission_capacity,
    upper_factor,
)
from dosched.config import NetworkConfig, SchedulerKind, ThresholdPolicy, UniformDistance
from dosched.errors import ParameterError
from dosched.quadrature import trapezoid_log_grid

NO_THRESHOLD = ThresholdPolicy(0.0)
CH = ThresholdPolicy(1.0, 1.0)


def test_psi():
    assert psi(4.0) == pytest.approx(math.pi ** 2 / 2, rel=1e-14)
    assert psi(math.inf) == math.pi
    with pytest.raises(ParameterError):
        psi(2.0)


def test_a_function_closed_form_vs_quadrature():
    for alpha in (3.0, 4.0):
        for x in (1e-6, 1e-3, 1.0):
            a = a_function(x, 1e-4, alpha)
            q = a_function(x, 1e-4, alpha, method="quadrature")
            assert q == pytest.approx(a, rel=1e-7)


def test_a_function_nonhomogeneous_vs_trapezoid():
    # intensity rising smoothly from 0 over a scale r0
    alpha, x, r0, lam = 4.0, 1e-4, 20.0, 1e-3
    fn = lambda r: lam * -np.expm1(-((r / r0) ** 2))  # noqa: E731
    k = 2 / alpha
    ref = 2 * math.pi / alpha * x ** -k * trapezoid_log_grid(
        lambda u: fn((u / x) ** (1 / alpha)) * u ** (k - 1) * np.exp(-u), n=2_000_001
    )
    assert a_function(x, fn, alpha) == pytest.approx(ref, rel=1e-4)


def test_mean_functionals_of_constant():
    assert gamma_mean_functional(3.0, 0.5, method="quadrature") == pytest.approx(3.0, rel=1e-8)
    assert beta_mean_functional(3.0, 0.5, 0.5, method="quadrature") == pytest.approx(3.0, rel=1e-7)
    assert gamma_mean_functional(3.0, 0.5) == 3.0


def test_upper_factor_clamp():
    alpha = 4.0
    ac = critical_a(alpha)
    assert ac == pytest.approx(3 * (3 - math.sqrt(5)) / 2)
    below, cl = upper_factor(ac * (1 - 1e-9), alpha)
    assert not cl and below == pytest.approx(1.0, abs=1e-7)
    assert upper_factor(ac, alpha) == (1.0, True)
    assert upper_factor(0.0, alpha) == (0.0, False)


def test_shot_noise_bounds_ordered():
    for x in np.logspace(-8, -3, 12):
        b = shot_noise_ccdf_bounds(float(x), 1e-4, 4.0)
        assert 0 <= b.lower <= b.upper <= 1


def test_reference_outage_value(cfg):
    b = dcas_outage_bounds(1e-4, cfg, NO_THRESHOLD)
    assert b.lower == b.upper
    assert b.lower == pytest.approx(-math.expm1(-1e-4 * 64 * math.sqrt(2) * math.pi ** 2 / 2), rel=1e-13)
    assert b.lower == pytest.approx(0.0436819479946, abs=1e-12)


def test_dicas_with_unit_pi_is_dcas(cfg):
    for lam in np.logspace(-6, -2, 9):
        a = dcas_outage_bounds(lam, cfg, CH)
        b = dicas_outage_bounds(lam, cfg, CH, 1.0)
        assert (a.lower, a.upper) == (b.lower, b.upper)


def test_bounds_ordered_and_monotone(cfg):
    prev = None
    for lam in np.logspace(-6, -2, 20):
        b = dcas_outage_bounds(lam, cfg, CH)
        assert b.lower <= b.upper
        if prev is not None:
            assert b.lower >= prev.lower
        prev = b


def test_dias_bounds_form(cfg):
    m = 1e-4 * 0.5 * math.sqrt(2) * psi(4.0) * 64
    b = dias_outage_bounds(1e-4, cfg, 0.5)
    assert b.lower == pytest.approx(-math.expm1(-m))
    assert b.upper == pytest.approx(-math.expm1(-2 * m))
    with pytest.raises(ParameterError):
        dias_outage_bounds(1e-4, cfg, 0.0)


def test_channel_policy_exponent_checked(cfg):
    with pytest.raises(ParameterError):
        dcas_outage_bounds(1e-4, cfg, ThresholdPolicy(1.0, -1.0))


def test_cancelable_intensity_at_origin(cfg):
    assert cancelable_intensity(0.0, 1e-4, cfg, CH) == pytest.approx(1e-4)
    r = np.linspace(0, 40, 9)
    v = cancelable_intensity(r, 1e-4, cfg, CH)
    assert np.all(np.diff(v) <= 0) and np.all(v >= 0)


@pytest.mark.parametrize("variant", list(IcVariant))
def test_ic_bounds_not_above_plain(cfg, variant):
    for lam in np.logspace(-5, -3, 5):
        ic = ic_outage_bounds_dicas(lam, cfg, CH, 0.7, variant)
        pl = dicas_outage_bounds(lam, cfg, CH, 0.7)
        assert ic.lower <= pl.lower + 1e-15
        assert ic.upper <= pl.upper + 1e-15


def test_ic_beta_variants_agree_without_threshold(cfg):
    a = ic_outage_bounds_dcas(1e-4, cfg, NO_THRESHOLD, IcVariant.BETA)
    b = ic_outage_bounds_dcas(1e-4, cfg, NO_THRESHOLD, IcVariant.BETA_TILDE)
    assert a.lower == pytest.approx(b.lower, rel=1e-12)


def test_ic_dias_below_plain(cfg):
    for lam in (1e-5, 1e-4, 1e-3):
        assert ic_outage_bounds_dias(lam, cfg, 0.6).upper < dias_outage_bounds(lam, cfg, 0.6).upper


def test_coverage_measure(cfg):
    assert dominant_coverage_measure(0.0, cfg) == pytest.approx(64 * math.sqrt(2) * math.pi ** 2 / 2)
    vals = [dominant_coverage_measure(d, cfg) for d in (0.0, 1e-6, 1e-5, 1e-4, 1e-3)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    # the gap to Delta = 0 shrinks like sqrt(Delta)
    assert dominant_coverage_measure(1e-20, cfg) == pytest.approx(vals[0], rel=1e-6)


def test_coverage_measure_random_distance():
    cfg = NetworkConfig(distance_law=UniformDistance(4.0, 12.0))
    assert dominant_coverage_measure(0.0, cfg) == pytest.approx(
        math.sqrt(2) * psi(4.0) * (12 ** 3 - 4 ** 3) / 3 / 8, rel=1e-10
    )


def test_density_inversion_hits_epsilon(cfg):
    kind = SchedulerKind.dcas(1.0, 1.0)
    db = invert_outage_for_density(kind, cfg)
    assert 0 < db.lower <= db.upper
    lo_b, _ = scheme_outage_bounds(kind, db.lower, cfg)
    up_b, _ = scheme_outage_bounds(kind, db.upper, cfg)
    assert lo_b.upper == pytest.approx(cfg.epsilon, rel=1e-9)
    assert up_b.lower == pytest.approx(cfg.epsilon, rel=1e-9)
    assert db.tc_lower == pytest.approx(transmission_capacity(db.lower, cfg))


def test_density_bound_selector_checked(cfg):
    with pytest.raises(ParameterError):
        density_bound("middle", SchedulerKind.none(), cfg)


def test_asymptotic_ratio_values():
    assert asymptotic_ratio("dcas", 0.0) == pytest.approx(math.sqrt(4 / 3))
    assert asymptotic_ratio("dcas", 1.0) == pytest.approx((4 / 3) ** (2 / 3))
    assert asymptotic_ratio("dias", delta=0.2) == 2.0
    assert asymptotic_ratio("dias", delta=0.6) == pytest.approx(2 ** (2 / 2.4))


def test_upper_factor_small_a_keeps_order():
    for a_val in (1e-31, 1e-17, 1e-9):
        up, _ = upper_factor(a_val, 4.0)
        assert up >= -math.expm1(-a_val) > 0
