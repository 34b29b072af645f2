"""Pick the compiled kernels when available, else the pure-Python mirror.

Set ``CHAOSPSO_PURE=1`` to force the fallback.
"""

import os

if os.environ.get("CHAOSPSO_PURE", "") not in ("", "0"):
    from . import _pure as core
else:
    try:
        from . import _kernels as core
    except ImportError:  # extension not built
        from . import _pure as core

BACKEND = core.BACKEND
