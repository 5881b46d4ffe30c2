"""numba switch.

Kernels are compiled with ``numba.njit`` unless numba is missing or the
environment variable ``QGEOM_DISABLE_JIT`` is set to a truthy value, in
which case the pure-numpy implementations are used instead.
"""
import os

try:
    import numba as nb

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

JIT_DISABLED = (not HAVE_NUMBA) or os.environ.get("QGEOM_DISABLE_JIT", "").lower() in (
    "1",
    "true",
    "yes",
    "on",
)


def njit(*args, **kwargs):
    """``numba.njit`` when available, identity decorator otherwise."""
    if HAVE_NUMBA:
        return nb.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda func: func
