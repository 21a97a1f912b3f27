"""Select the kernel implementation at import time.

The compiled ``_ckernels`` module is preferred.  Setting ``DBCS_PURE_PYTHON=1``
forces the pure-Python twin, which is also used when the extension is absent.
"""

import os

if os.environ.get("DBCS_PURE_PYTHON") == "1":
    from . import _pykernels as kernels
else:
    try:
        from . import _ckernels as kernels
    except ImportError:
        from . import _pykernels as kernels

BACKEND = kernels.BACKEND

__all__ = ["kernels", "BACKEND"]
