"""Backend selection for the counting kernels.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
numpy implementations in ``_pykernels`` are used.  Setting the environment
variable ``PERMHAAR_PURE_PYTHON=1`` forces the fallback.
"""
import os
from types import ModuleType

from . import _pykernels

__all__ = ["BACKEND", "backend", "stat_x", "stat_y", "stat_z", "count_a"]


def _load() -> tuple[str, ModuleType]:
    if os.environ.get("PERMHAAR_PURE_PYTHON", "").strip() not in ("", "0"):
        return "python", _pykernels
    try:
        from . import _ckernels
    except ImportError:
        return "python", _pykernels
    return "cython", _ckernels


BACKEND, _impl = _load()


def backend(name: str | None = None) -> ModuleType:
    """Return a kernel module by name (``"cython"`` or ``"python"``)."""
    if name is None:
        return _impl
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown backend {name!r}")


stat_x = _impl.stat_x
stat_y = _impl.stat_y
stat_z = _impl.stat_z
count_a = _impl.count_a
