"""Kernel backend selection.

The compiled Cython extension is used when it imports; otherwise the
pure-Python twins are used. ``neumaier_sum`` and ``ldl_coframe`` are
bit-identical across backends; ``spin_connection`` agrees to rounding. Set ``TOPOSPEC_PURE_PYTHON=1`` to force the
fallback.
"""

import os

from . import _kernels_py

if os.environ.get("TOPOSPEC_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

neumaier_sum = _impl.neumaier_sum
ldl_coframe = _impl.ldl_coframe
spin_connection = _impl.spin_connection

__all__ = ["BACKEND", "neumaier_sum", "ldl_coframe", "spin_connection"]
