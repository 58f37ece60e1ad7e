"""
Optional numba acceleration.

Hot kernels are written twice: a numba-compiled loop version and a
vectorised numpy version. Set ``LINKER_SCOUT_DISABLE_JIT=1`` to force the
numpy path (numba is also skipped automatically when it is not installed).
Both paths are required to give identical results.
"""

import os

_FALSE = {"", "0", "false", "no", "off"}


def _jit_disabled():
    return os.environ.get("LINKER_SCOUT_DISABLE_JIT", "").strip().lower() not in _FALSE


try:
    import numba
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda fn: fn


USE_NUMBA = HAVE_NUMBA and not _jit_disabled()


def set_threads(n):
    """Cap numba's worker pool. A no-op on the numpy path."""
    if n is None or not HAVE_NUMBA:
        return
    n = max(1, min(int(n), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(n)


def threads_from_env():
    value = os.environ.get("LINKER_SCOUT_THREADS")
    return int(value) if value else None
