"""Kernel backend selection: numba JIT by default, pure array fallback on request.

The hot inner loops (physics integration, network activation, full episode
rollouts, greedy modularity merging) live in :mod:`neatlab.kernels` and are
decorated with :func:`jit`. The backend is chosen once at import time from the
``NEATLAB_NUMBA`` environment variable:

* ``NEATLAB_NUMBA=1``    force numba (ImportError if it is missing)
* ``NEATLAB_NUMBA=0``    force the pure Python/NumPy fallback
* unset or ``auto``      use numba when importable, fallback otherwise

Both backends execute the same source and the same arithmetic order, so
results agree to floating-point noise; artifacts are byte-reproducible within
a fixed backend. ``benchmarks/bench_kernels.py`` compares the two.
"""

import os

_FLAG = os.environ.get("NEATLAB_NUMBA", "auto").strip().lower()

if _FLAG in ("0", "off", "false", "no"):
    NUMBA_ENABLED = False
elif _FLAG in ("1", "on", "true", "yes", "force"):
    from numba import njit  # noqa: F401  (hard requirement when forced)

    NUMBA_ENABLED = True
else:
    try:
        from numba import njit

        NUMBA_ENABLED = True
    except ImportError:
        NUMBA_ENABLED = False


def jit(func):
    """Decorate a hot kernel: numba njit (nogil, cached) or identity fallback."""
    if NUMBA_ENABLED:
        return njit(cache=True, nogil=True, fastmath=False)(func)
    return func


def backend_name() -> str:
    return "numba" if NUMBA_ENABLED else "python"
