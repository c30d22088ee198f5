"""Backend selection for the hot kernels.

The compiled extension is preferred when importable; the numpy fallback is
behaviorally identical (bit-for-bit), just slower. Set RISKBANDIT_PURE_PYTHON=1
to force the fallback, e.g. to compare backends or debug.
"""
from __future__ import annotations

import os

from . import _kernels_py

_force_py = os.environ.get("RISKBANDIT_PURE_PYTHON", "").strip() not in ("", "0")

if _force_py:
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

scan_best_case = _impl.scan_best_case
select_slate = _impl.select_slate


def backend() -> str:
    """Name of the active kernel backend: 'compiled' or 'python'."""
    return BACKEND
