"""Kernel backend chosen at import: compiled if available, else pure Python.

Set ``ZCURV_PURE=1`` to force the pure-Python kernels.
"""

import os

from . import _fallback

fallback = _fallback

if os.environ.get("ZCURV_PURE", "") not in ("", "0"):
    kernels = _fallback
    NAME = "python"
else:
    try:
        from . import _kernels as kernels
        NAME = "cython"
    except ImportError:
        kernels = _fallback
        NAME = "python"

compiled = None
try:
    from . import _kernels as compiled
except ImportError:
    pass
