"""Kernel backend selection.

The compiled extension is preferred when importable; set POTTSFORGE_PURE=1
to force the pure-Python twin (used by the equivalence tests and the
benchmark).  Both backends expose the same functions with identical
semantics, including the random bit stream.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("POTTSFORGE_PURE"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

BACKEND_NAME = _impl.BACKEND_NAME

subset_class_counts = _impl.subset_class_counts
largest_component = _impl.largest_component
hb_run = _impl.hb_run
hb_coupled_run = _impl.hb_coupled_run


def get_backend(name: str | None = None):
    """Return a specific backend module ('python' or 'cython'), or the
    active one when name is None."""
    if name is None:
        return _impl
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels  # raises ImportError when not built

        return _kernels
    raise ValueError(f"unknown backend {name!r}")
