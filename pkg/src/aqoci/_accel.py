"""Numba acceleration toggle for the hot kernels.

Kernels are compiled with ``numba.njit`` unless the environment variable
``AQOCI_PURE_NUMPY=1`` is set (or numba is not importable), in which case the
same functions run as plain Python over numpy scalars. Results are identical
either way; only speed differs. ``benchmarks/bench_accel.py`` compares the two
paths.
"""

from __future__ import annotations

import functools
import os

import numpy as np


def _env_disabled() -> bool:
    return os.environ.get("AQOCI_PURE_NUMPY", "").strip().lower() in (
        "1",
        "true",
        "yes",
        "on",
    )


USE_NUMBA = not _env_disabled()
if USE_NUMBA:
    try:
        import numba
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USE_NUMBA = False


def maybe_jit(signature: str | None = None):
    """Return the jit decorator, or a plain-call wrapper in fallback mode.

    Explicit signatures are needed for the uint64 PRNG helpers: without one,
    numba boxes returned uint64 state as a signed int at the Python boundary
    and a re-entrant call silently recompiles with int64 arguments.

    The fallback wrapper suppresses numpy's scalar-overflow RuntimeWarning:
    the uint64 wraparound inside the PRNG arithmetic is intentional.
    """

    def decorate(fn):
        if USE_NUMBA:
            if signature is not None:
                return numba.njit(signature, cache=True)(fn)
            return numba.njit(cache=True)(fn)

        @functools.wraps(fn)
        def wrapper(*args):
            with np.errstate(over="ignore"):
                return fn(*args)

        wrapper.py_func = fn
        return wrapper

    return decorate
