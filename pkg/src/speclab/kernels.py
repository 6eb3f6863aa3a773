"""Backend selection for the hot loops.

The compiled extension ``speclab._ckernels`` is used when importable;
otherwise the pure-Python module ``speclab._pykernels`` takes over.
Setting ``SPECLAB_PURE=1`` forces the fallback.
"""
from __future__ import annotations

import importlib
import os
from types import ModuleType

from . import _pykernels


def _load() -> tuple[ModuleType, str]:
    if os.environ.get("SPECLAB_PURE", "") not in ("", "0"):
        return _pykernels, "python"
    try:
        mod = importlib.import_module("speclab._ckernels")
    except ImportError:
        return _pykernels, "python"
    return mod, "cython"


impl, BACKEND = _load()


def backend(name: str | None = None) -> ModuleType:
    """Return a specific backend module ("python" or "cython")."""
    if name is None:
        return impl
    if name == "python":
        return _pykernels
    if name == "cython":
        return importlib.import_module("speclab._ckernels")
    raise ValueError(f"unknown backend {name!r}")


def compiled_available() -> bool:
    try:
        importlib.import_module("speclab._ckernels")
    except ImportError:
        return False
    return True
