"""Kernel selection.

The compiled extension is used when it imports and ``QCHAR_PURE`` is not set
to a true value; otherwise the pure-Python module provides the same functions.
"""

from __future__ import annotations

import os

from . import _kernels_py

IMPLEMENTATION = "python"

if os.environ.get("QCHAR_PURE", "").lower() not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        IMPLEMENTATION = "compiled"
    except ImportError:  # extension not built
        _impl = _kernels_py
else:
    _impl = _kernels_py

convolve = _impl.convolve
inverse_unit = _impl.inverse_unit
inverse_scaled = _impl.inverse_scaled
power_unit = _impl.power_unit
geometric_update = _impl.geometric_update

__all__ = [
    "IMPLEMENTATION",
    "convolve",
    "inverse_unit",
    "inverse_scaled",
    "power_unit",
    "geometric_update",
]
