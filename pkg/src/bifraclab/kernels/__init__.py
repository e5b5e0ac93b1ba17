"""Rectangle-scan kernels with a compiled fast path.

The Cython extension `_fast` is used when available; otherwise the
pure-numpy `_ref` module is selected.  Both produce bit-identical
results.  Set BFL_BACKEND=python or BFL_BACKEND=compiled to force a
backend (the latter raises if the extension is missing).
"""

from __future__ import annotations

import os

from . import _ref

_requested = os.environ.get("BFL_BACKEND", "").strip().lower()

if _requested == "python":
    _impl = _ref
    BACKEND = "python"
else:
    try:
        from . import _fast as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise
        _impl = _ref
        BACKEND = "python"

sat2 = _impl.sat2
rect_sums = _impl.rect_sums
strong_maximal_scan = _impl.strong_maximal_scan
axis_maximal_scan = _impl.axis_maximal_scan

__all__ = [
    "BACKEND",
    "sat2",
    "rect_sums",
    "strong_maximal_scan",
    "axis_maximal_scan",
]
