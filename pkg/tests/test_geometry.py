import math

import numpy as np
import pytest
from scipy import stats

from dosched.config import NetworkConfig, UniformDistance
from dosched.errors import ParameterError
from dosched.geometry import (
    Window,
    as_generator,
    sample_network,
    sample_ppp,
    scale_process,
    tail_rule_radius,
    trial_rng,
)


def test_seed_required():
    with pytest.raises(ParameterError):
        as_generator(None)


def test_window_rejects_nonpositive():
    with pytest.raises(ParameterError):
        Window(0.0)


def test_tail_rule_radius():
    assert tail_rule_radius(4.0) == pytest.approx(math.sqrt(1e4 + 1))
    assert tail_rule_radius(3.0) == pytest.approx(1e4 + 1)


def test_empty_process():
    assert len(sample_ppp(0.0, Window(50.0), 1)) == 0


def test_poisson_count_mean_and_variance():
    w = Window(30.0)
    lam = 0.01
    counts = np.array([len(sample_ppp(lam, w, trial_rng(5, t))) for t in range(3000)])
    mean = lam * w.area
    se = math.sqrt(mean / len(counts))
    assert abs(counts.mean() - mean) < 4 * se
    # variance of the sample variance of a Poisson is about 2 mean^2 / n
    assert abs(counts.var(ddof=1) / mean - 1) < 4 * math.sqrt(2 / len(counts))


def test_positions_uniform_in_disc():
    w = Window(10.0)
    pts = sample_ppp(5.0, w, 3).points
    assert np.all(np.hypot(pts[:, 0], pts[:, 1]) <= w.radius)
    # r^2/R^2 is U(0,1) and the angle is U(0, 2 pi)
    r2 = (pts ** 2).sum(axis=1) / w.radius ** 2
    theta = np.mod(np.arctan2(pts[:, 1], pts[:, 0]), 2 * np.pi) / (2 * np.pi)
    for u in (r2, theta):
        hist, _ = np.histogram(u, bins=20, range=(0, 1))
        assert stats.chisquare(hist).pvalue > 1e-3


def test_scale_process_density():
    w = Window(20.0)
    base = sample_ppp(0.5, w, 11)
    scaled = scale_process(base, 4.0)
    assert scaled.window.radius == 40.0
    np.testing.assert_array_equal(scaled.points, base.points * 2.0)
    assert len(scaled) / scaled.window.area == pytest.approx(len(base) / w.area / 4.0)
    assert scale_process(base, 1.0) is base


def test_scale_process_rejects_bad_factor():
    with pytest.raises(ParameterError):
        scale_process(sample_ppp(1.0, Window(1.0), 0), 0.0)


def test_network_reference_pair(cfg):
    s = sample_network(cfg, Window(100.0), 4)
    np.testing.assert_array_equal(s.rx[0], [0.0, 0.0])
    assert np.hypot(*s.tx[0]) == pytest.approx(8.0)
    np.testing.assert_allclose(np.hypot(*(s.rx - s.tx).T), s.link_distances)
    assert s.active.all()
    assert s.reference_pair_index == 0


def test_network_uniform_distances():
    cfg = NetworkConfig(distance_law=UniformDistance(2.0, 6.0), lambda_t=1e-2)
    s = sample_network(cfg, Window(50.0), 2)
    assert np.all((s.link_distances >= 2.0) & (s.link_distances <= 6.0))


def test_network_window_too_small(cfg):
    with pytest.raises(ParameterError):
        sample_network(cfg, Window(5.0), 0)


def test_same_seed_same_sample(cfg):
    a = sample_network(cfg, Window(100.0), trial_rng(9, 3))
    b = sample_network(cfg, Window(100.0), trial_rng(9, 3))
    np.testing.assert_array_equal(a.tx, b.tx)
    np.testing.assert_array_equal(a.signal_fades, b.signal_fades)
