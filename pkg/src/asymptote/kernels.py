"""Backend selection for the hot loops.

The compiled extension is used when it imports cleanly; otherwise, or when
``ASYMPTOTE_PURE_PYTHON=1`` is set, the numpy versions are used.
"""

import os

from asymptote import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("ASYMPTOTE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from asymptote import _kernels as _compiled
    except ImportError:  # pragma: no cover - depends on build
        _compiled = None
    if _compiled is not None:
        _impl = _compiled
        BACKEND = "cython"


def segment_intersections(P, Q, same=False):
    return _impl.segment_intersections(P, Q, bool(same))


def gauss_sum(a, da, b, db, w):
    return _impl.gauss_sum(a, da, b, db, w)


def starshaped_scan(c, dx, dy, px, py):
    return _impl.starshaped_scan(c, dx, dy, px, py)


def backend():
    """Name of the active backend, ``"cython"`` or ``"python"``."""
    return BACKEND
