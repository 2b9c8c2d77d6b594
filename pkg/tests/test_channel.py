import math

import numpy as np
import pytest

from dosched.channel import interference_at_origin, path_gain, sir_at_reference
from dosched.config import NetworkConfig
from dosched.errors import ContractError, ParameterError
from dosched.geometry import Window, sample_network, trial_rng


def test_path_gain():
    assert path_gain(2.0, 4.0) == 1 / 16
    np.testing.assert_allclose(path_gain(np.array([1.0, 10.0]), 3.0), [1.0, 1e-3])
    with pytest.raises(ParameterError):
        path_gain(0.0, 4.0)
    with pytest.raises(ParameterError):
        path_gain(1.0, 2.0)


def test_no_interferers_gives_infinite_sir(cfg):
    s = sample_network(cfg.with_(lambda_t=0.0), Window(100.0), 0)
    i = interference_at_origin(s, rng_seed=1)
    assert i == 0.0
    assert math.isinf(sir_at_reference(s, i).sir)
    assert not sir_at_reference(s, i).outage(2.0)


def test_inactive_reference_rejected(cfg):
    s = sample_network(cfg, Window(100.0), 0)
    s = s.with_(active=np.zeros(s.n_pairs, dtype=bool))
    with pytest.raises(ContractError):
        sir_at_reference(s, 1.0)


def test_campbell_mean():
    # E[I] over 1 < |x| < R is 2 pi lam (1 - R^(2-a))/(a-2)
    cfg = NetworkConfig(lambda_t=1.0, alpha=4.0)
    w = Window(20.0)
    vals = []
    for t in range(4000):
        rng = trial_rng(21, t)
        s = sample_network(cfg, w, rng)
        vals.append(interference_at_origin(s, rng_seed=rng, min_distance=1.0))
    expected = 2 * math.pi * 1.0 * (1 - w.radius ** -2.0) / 2.0
    assert np.mean(vals) == pytest.approx(expected, rel=0.03)


def test_sir_value(cfg):
    s = sample_network(cfg, Window(100.0), 3)
    r = sir_at_reference(s, 2e-4)
    assert r.signal == pytest.approx(s.signal_fades[0] * 8.0 ** -4)
    assert r.sir == pytest.approx(r.signal / 2e-4)
