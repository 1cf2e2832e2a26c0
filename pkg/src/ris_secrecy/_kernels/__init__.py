"""Kernel backend selection.

The compiled extension is used when it imports cleanly; otherwise, or when
``RIS_SECRECY_PURE_PYTHON=1`` is set, the NumPy fallback is used. Both expose
``inner_scan`` and ``enumerate_q`` with identical signatures.
"""
from __future__ import annotations

import os

from . import _fallback

fallback = _fallback
compiled = None
if os.environ.get("RIS_SECRECY_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as compiled  # type: ignore[no-redef]
    except ImportError:  # extension not built
        compiled = None

active = compiled if compiled is not None else fallback
BACKEND = "compiled" if compiled is not None else "python"

inner_scan = active.inner_scan
enumerate_q = active.enumerate_q
lattice_size = _fallback.lattice_size
first_index_at_least = _fallback.first_index_at_least

__all__ = ["BACKEND", "compiled", "fallback", "inner_scan", "enumerate_q",
           "lattice_size", "first_index_at_least"]
