"""Hot per-trial kernels.

The compiled extension is used when it imports; otherwise the NumPy
fallback.  ``DOSCHED_BACKEND=python`` forces the fallback and
``DOSCHED_BACKEND=cython`` makes a missing extension an error.
"""

import os

from . import _fallback

BACKEND_ENV = "DOSCHED_BACKEND"


def _select():
    choice = os.environ.get(BACKEND_ENV, "auto").lower()
    if choice not in ("auto", "cython", "python"):
        raise ImportError(f"{BACKEND_ENV} must be auto, cython or python, got {choice!r}")
    if choice == "python":
        return _fallback, "python"
    try:
        from . import _ckernels
    except ImportError:
        if choice == "cython":
            raise
        return _fallback, "python"
    return _ckernels, "cython"


_impl, BACKEND = _select()
outage_block = _impl.outage_block

__all__ = ["outage_block", "BACKEND", "BACKEND_ENV"]
