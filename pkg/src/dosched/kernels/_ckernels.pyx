# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=False
"""Compiled per-trial reductions over ragged interferer arrays."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def outage_block(const double[::1] gains, const cnp.int64_t[::1] offsets,
                 const double[::1] signal, double beta):
    """Interference, outage and single-pass IC outage for a block of trials.

    Trial ``t`` owns ``gains[offsets[t]:offsets[t + 1]]``.  Sums run left to
    right so the NumPy fallback reproduces them exactly.
    """
    cdef Py_ssize_t m = signal.shape[0]
    cdef Py_ssize_t t, k, lo, hi
    cdef double s, tot, rest, g
    interference = np.empty(m, dtype=np.float64)
    residual = np.empty(m, dtype=np.float64)
    outage = np.empty(m, dtype=np.uint8)
    ic_outage = np.empty(m, dtype=np.uint8)
    cdef double[::1] I = interference
    cdef double[::1] Inc = residual
    cdef cnp.uint8_t[::1] out = outage
    cdef cnp.uint8_t[::1] out_ic = ic_outage
    with nogil:
        for t in range(m):
            lo = offsets[t]
            hi = offsets[t + 1]
            s = signal[t]
            tot = 0.0
            for k in range(lo, hi):
                tot = tot + gains[k]
            rest = 0.0
            for k in range(lo, hi):
                g = gains[k]
                if not (g / (tot - g + s) >= beta):
                    rest = rest + g
            I[t] = tot
            Inc[t] = rest
            out[t] = tot > 0.0 and s / tot < beta
            out_ic[t] = rest > 0.0 and s / rest < beta
    return interference, residual, outage.view(np.bool_), ic_outage.view(np.bool_)
