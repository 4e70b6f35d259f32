"""Kernel compilation switch.

Hot scalar kernels are written in the numba-compatible subset of Python and
decorated with :func:`kernel`.  When numba is importable and the environment
variable ``DIVEMETA_PURE_NUMPY`` is unset (or ``0``), they are compiled with
``numba.njit``; otherwise the very same source runs as plain Python/NumPy.
Both paths execute one algorithm, so results agree to floating-point noise.
"""

import os

_FLAG = "DIVEMETA_PURE_NUMPY"


def _numba_requested():
    return os.environ.get(_FLAG, "0").strip().lower() in ("", "0", "false", "no")


try:
    if not _numba_requested():
        raise ImportError
    import numba

    USE_NUMBA = True
except ImportError:
    numba = None
    USE_NUMBA = False


def kernel(func):
    """Compile ``func`` with numba when enabled, else return it untouched."""
    if USE_NUMBA:
        return numba.njit(cache=True, nogil=True)(func)
    return func


def backend():
    return "numba" if USE_NUMBA else "numpy"
