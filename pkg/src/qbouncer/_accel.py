"""Optional numba acceleration.

Set ``QBOUNCER_DISABLE_NUMBA=1`` to run every kernel as plain Python/numpy.
"""

import os

_DISABLED = os.environ.get("QBOUNCER_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _DISABLED:
        raise ImportError
    import numba
    USE_NUMBA = True
except ImportError:
    numba = None
    USE_NUMBA = False


def njit(fn):
    """``numba.njit(cache=True)`` when enabled, identity otherwise."""
    if USE_NUMBA:
        return numba.njit(cache=True)(fn)
    return fn
