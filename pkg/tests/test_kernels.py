import importlib

import numpy as np
import pytest

from dosched import kernels
from dosched.kernels import _fallback

try:
    from dosched.kernels import _ckernels
except ImportError:  # pragma: no cover
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled extension not built")


def _block(seed, m=64, mean_len=40):
    rng = np.random.default_rng(seed)
    lengths = rng.poisson(mean_len, m)
    lengths[::7] = 0
    offsets = np.concatenate([[0], np.cumsum(lengths)]).astype(np.int64)
    gains = rng.exponential(1.0, offsets[-1]) * rng.pareto(1.5, offsets[-1]) * 1e-6
    signal = rng.exponential(1.0, m) * 8.0 ** -4
    return gains, offsets, signal


def test_fallback_sums_and_flags():
    gains, offsets, signal = _block(0)
    tot, rest, out, out_ic = _fallback.outage_block(gains, offsets, signal, 2.0)
    for i in range(len(signal)):
        g = gains[offsets[i]:offsets[i + 1]]
        assert tot[i] == pytest.approx(g.sum(), rel=1e-12, abs=0)
        keep = g[~(g / (g.sum() - g + signal[i]) >= 2.0)]
        assert rest[i] == pytest.approx(keep.sum(), rel=1e-12, abs=0)
        assert out[i] == (tot[i] > 0 and signal[i] / tot[i] < 2.0)
        assert out_ic[i] <= out[i]


def test_empty_segments_are_not_outage():
    offsets = np.array([0, 0, 0], dtype=np.int64)
    tot, rest, out, out_ic = _fallback.outage_block(np.empty(0), offsets, np.ones(2), 2.0)
    assert not out.any() and not out_ic.any() and np.all(tot == 0)


@needs_ext
@pytest.mark.parametrize("seed", range(5))
def test_backends_bit_identical(seed):
    gains, offsets, signal = _block(seed, m=128)
    a = _fallback.outage_block(gains, offsets, signal, 2.0)
    b = _ckernels.outage_block(gains, offsets, signal, 2.0)
    for x, y in zip(a, b):
        np.testing.assert_array_equal(np.asarray(x), np.asarray(y))


def test_backend_env_forces_fallback(monkeypatch):
    monkeypatch.setenv(kernels.BACKEND_ENV, "python")
    mod = importlib.reload(kernels)
    try:
        assert mod.BACKEND == "python"
        monkeypatch.setenv(kernels.BACKEND_ENV, "fortran")
        with pytest.raises(ImportError):
            importlib.reload(kernels)
    finally:
        monkeypatch.delenv(kernels.BACKEND_ENV)
        importlib.reload(kernels)
