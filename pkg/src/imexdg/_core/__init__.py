"""Kernel backend selection.

The compiled Cython core is preferred when present; ``IMEXDG_BACKEND=python``
forces the NumPy fallback (used by the backend-parity tests and the
benchmark). ``active_backend()`` reports which one is live.
"""

from __future__ import annotations

import os

from .geometry import Geometry
from . import kernels_py

_FORCED = os.environ.get("IMEXDG_BACKEND", "").lower()

if _FORCED in ("", "cython", "c"):
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        if _FORCED:
            raise
        _impl = kernels_py
elif _FORCED in ("python", "numpy", "py"):
    _impl = kernels_py
else:
    raise RuntimeError(f"unknown IMEXDG_BACKEND={_FORCED!r}")

weak_gradient = _impl.weak_gradient
centered_div = _impl.centered_div
face_lambda = _impl.face_lambda
jump_penalty = _impl.jump_penalty
advect5 = _impl.advect5


def active_backend() -> str:
    return _impl.BACKEND_NAME


def backends() -> dict:
    """All importable backends, keyed by name (for tests/benchmarks)."""
    found = {kernels_py.BACKEND_NAME: kernels_py}
    try:
        from . import _kernels  # type: ignore[attr-defined]
        found[_kernels.BACKEND_NAME] = _kernels
    except ImportError:
        pass
    return found


__all__ = ["Geometry", "weak_gradient", "centered_div", "face_lambda",
           "jump_penalty", "advect5", "active_backend", "backends"]
