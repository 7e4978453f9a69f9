"""Kernel backend selection.

The hot inner loops live in `_kernels_numba` (default) with a pure-numpy twin
in `_kernels_numpy`. Set DPCONV_BACKEND=numpy to force the fallback, or
DPCONV_BACKEND=numba to fail loudly if numba cannot be imported. The choice is
made once at import time.
"""

import os

_ENV_VAR = "DPCONV_BACKEND"


def _select():
    choice = os.environ.get(_ENV_VAR, "").strip().lower()
    if choice not in ("", "numba", "numpy"):
        raise ValueError(f"{_ENV_VAR} must be 'numba' or 'numpy', got {choice!r}")
    if choice == "numpy":
        from . import _kernels_numpy as mod
        return mod, "numpy"
    # workqueue is always available; TBB/OpenMP probing emits warnings on some hosts
    os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")
    try:
        from . import _kernels_numba as mod
        return mod, "numba"
    except ImportError:
        if choice == "numba":
            raise
        from . import _kernels_numpy as mod
        return mod, "numpy"


kernels, BACKEND = _select()
