"""Path loss, interference at the reference receiver and the reference SIR."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, ParameterError
from .geometry import as_generator

__all__ = ["SirSample", "path_gain", "interference_at_origin", "sir_at_reference", "interferer_gains"]


@dataclass(frozen=True)
class SirSample:
    signal: float
    interference: float
    sir: float

    def outage(self, beta):
        return self.sir < beta


def path_gain(distance, alpha):
    """``distance ** -alpha``; works elementwise on arrays."""
    if not alpha > 2:
        raise ParameterError("alpha must be > 2")
    d = np.asarray(distance, dtype=float)
    if np.any(d <= 0):
        raise ParameterError("path gain is singular at distance 0")
    out = d ** (-alpha)
    return float(out) if out.ndim == 0 else out


def _interferer_index(sample):
    idx = np.nonzero(sample.active)[0]
    return idx[idx != sample.reference_pair_index]


def interferer_gains(sample, interferer_fades, min_distance=0.0):
    """Per-interferer received powers ``H_j |X_j|^-alpha``, in pair order.

    ``interferer_fades`` has one entry per active non-reference transmitter.
    Interferers closer than ``min_distance`` are dropped (test device only).
    """
    idx = _interferer_index(sample)
    fades = np.asarray(interferer_fades, dtype=float)
    if fades.shape != idx.shape:
        raise ParameterError(f"expected {len(idx)} interferer fades, got {fades.shape}")
    r2 = np.einsum("ij,ij->i", sample.tx[idx], sample.tx[idx])
    keep = r2 > min_distance * min_distance
    return fades[keep] * r2[keep] ** (-0.5 * sample.alpha)


def interference_at_origin(sample, interferer_fades=None, rng_seed=None, min_distance=0.0):
    """Aggregate interference ``sum H_j |X_j|^-alpha`` at the origin.

    When ``interferer_fades`` is None, fresh unit-exponential fades are drawn
    from ``rng_seed``.
    """
    if interferer_fades is None:
        rng = as_generator(rng_seed)
        interferer_fades = rng.exponential(1.0, len(_interferer_index(sample)))
    g = interferer_gains(sample, interferer_fades, min_distance)
    return math.fsum(g) if len(g) else 0.0


def sir_at_reference(sample, interference):
    """Signal, interference and SIR at the reference receiver.

    Zero interference gives ``sir = inf``, which never counts as outage.
    """
    ref = sample.reference_pair_index
    if not sample.active[ref]:
        raise ContractError("reference pair is not active")
    if interference < 0:
        raise ParameterError("interference must be >= 0")
    signal = float(sample.signal_fades[ref] * sample.link_distances[ref] ** (-sample.alpha))
    sir = math.inf if interference == 0 else signal / interference
    return SirSample(signal, float(interference), sir)
