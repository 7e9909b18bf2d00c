"""Kernel selection: the compiled extension when present, else pure Python.

Set ``TRUSTLAB_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os
from typing import Callable, Optional

from . import _pykernel

try:
    from . import _kernel as _ckernel
except ImportError:  # extension not built
    _ckernel = None

AVAILABLE = ("cython", "python") if _ckernel is not None else ("python",)


def _default() -> str:
    if os.environ.get("TRUSTLAB_PURE_PYTHON", "").strip() not in ("", "0"):
        return "python"
    return AVAILABLE[0]


ACTIVE = _default()


def get_kernel(name: Optional[str] = None) -> Callable:
    name = name or ACTIVE
    if name == "cython":
        if _ckernel is None:
            raise ImportError("the compiled kernel is not built; reinstall the package or use backend='python'")
        return _ckernel.simulate
    if name == "python":
        return _pykernel.simulate
    raise ValueError(f"unknown backend {name!r}")
