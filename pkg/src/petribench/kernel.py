"""Select the exploration kernel at import time.

The compiled kernel is used when it was built; setting ``PETRIBENCH_PURE=1``
forces the pure-Python one.
"""
from __future__ import annotations

import os

from . import _pykernel

try:
    from . import _ckernel
except ImportError:  # extension not built
    _ckernel = None

AVAILABLE = {"python": _pykernel.Explorer}
if _ckernel is not None:
    AVAILABLE["cython"] = _ckernel.Explorer

if os.environ.get("PETRIBENCH_PURE", "").strip() not in ("", "0") or _ckernel is None:
    KERNEL = "python"
else:
    KERNEL = "cython"

Explorer = AVAILABLE[KERNEL]


def explorer_class(name: str | None = None):
    """The Explorer class for ``name`` (``"cython"`` or ``"python"``), default the selected one."""
    if name is None:
        return Explorer
    try:
        return AVAILABLE[name]
    except KeyError:
        raise ValueError(f"kernel {name!r} is not available; have {sorted(AVAILABLE)}") from None
