"""NumPy implementation of the per-trial reductions."""

import numpy as np


def _sequential_sums(values, offsets):
    # Pad segments into columns and reduce over rows: np.add.reduce along
    # axis 0 adds rows in order, matching a left-to-right scalar loop.
    m = len(offsets) - 1
    lengths = np.diff(offsets)
    width = int(lengths.max()) if m else 0
    if width == 0:
        return np.zeros(m)
    pad = np.zeros((width, m))
    col = np.repeat(np.arange(m), lengths)
    row = np.arange(len(values)) - np.repeat(offsets[:-1], lengths)
    pad[row, col] = values
    return np.add.reduce(pad, axis=0)


def outage_block(gains, offsets, signal, beta):
    """Interference, outage and single-pass IC outage for a block of trials.

    See the compiled version for the contract.
    """
    gains = np.ascontiguousarray(gains, dtype=np.float64)
    offsets = np.ascontiguousarray(offsets, dtype=np.int64)
    signal = np.ascontiguousarray(signal, dtype=np.float64)
    lengths = np.diff(offsets)
    tot = _sequential_sums(gains, offsets)
    tot_k = np.repeat(tot, lengths)
    s_k = np.repeat(signal, lengths)
    with np.errstate(divide="ignore", invalid="ignore"):
        cancel = gains / (tot_k - gains + s_k) >= beta
        rest = _sequential_sums(np.where(cancel, 0.0, gains), offsets)
        outage = (tot > 0.0) & (signal / tot < beta)
        ic_outage = (rest > 0.0) & (signal / rest < beta)
    return tot, rest, outage, ic_outage
