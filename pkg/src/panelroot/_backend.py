"""Select compiled or numpy kernels at import time.

Set ``PANELROOT_BACKEND=python`` to force the numpy fallback.
"""
from __future__ import annotations

import os

from . import _fallback

IMPLEMENTATIONS = {"python": _fallback}
try:
    from . import _kernels

    IMPLEMENTATIONS["compiled"] = _kernels
except ImportError:
    pass

_requested = os.environ.get("PANELROOT_BACKEND", "").lower()
if _requested == "python" or "compiled" not in IMPLEMENTATIONS:
    BACKEND = "python"
else:
    BACKEND = "compiled"

_impl = IMPLEMENTATIONS[BACKEND]
jacobi_eigh = _impl.jacobi_eigh
first_order_recursion = _impl.first_order_recursion
