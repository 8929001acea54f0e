"""Pick the compiled kernels when available, else the numpy fallback.

Set ``SOFTOOK_PURE_PYTHON=1`` to force the fallback.
"""

import os

from softook import _pykernels

if os.environ.get("SOFTOOK_PURE_PYTHON", "") not in ("", "0"):
    kernels = _pykernels
    BACKEND = "python"
else:
    try:
        from softook import _kernels as kernels
        BACKEND = "cython"
    except ImportError:
        kernels = _pykernels
        BACKEND = "python"
