"""Selects the compiled kernels when available, NumPy fallback otherwise.

Set LABPULSE_NO_EXT=1 to force the fallback (used by the benchmark and
the equivalence tests).  ``USING_EXTENSION`` reports what was picked.
"""

from __future__ import annotations

import os

from . import _kernels_py

USING_EXTENSION = False
_impl = _kernels_py

if not os.environ.get("LABPULSE_NO_EXT"):
    try:
        from . import _kernels as _ext

        _impl = _ext
        USING_EXTENSION = True
    except ImportError:
        pass

frame_to_lab = _impl.frame_to_lab
rasterize_mask = _impl.rasterize_mask
