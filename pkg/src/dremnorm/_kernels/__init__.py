"""Numerical inner loops with a compiled fast path.

The compiled Cython extension is preferred when present; otherwise the
pure-Python reference implementation is used. Set the environment variable
DREMNORM_KERNEL_BACKEND to "python" or "compiled" before import to force a
backend (forcing "compiled" raises if the extension is unavailable).
"""

from __future__ import annotations

import os

from . import _ref

_requested = os.environ.get("DREMNORM_KERNEL_BACKEND", "").strip().lower()

if _requested == "python":
    _impl = _ref
elif _requested == "compiled":
    from . import _core as _impl  # type: ignore[no-redef]
elif _requested:
    raise ValueError(
        f"DREMNORM_KERNEL_BACKEND={_requested!r}: expected 'python' or 'compiled'"
    )
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _ref

BACKEND: str = "python" if _impl is _ref else "compiled"

adjugate_det = _impl.adjugate_det
lti_euler_states = _impl.lti_euler_states
drem_mix_series = _impl.drem_mix_series
gradient_series = _impl.gradient_series


def available_backends() -> dict[str, object]:
    """Map of importable backend name -> kernel module."""
    out: dict[str, object] = {"python": _ref}
    try:
        from . import _core

        out["compiled"] = _core
    except ImportError:
        pass
    return out
