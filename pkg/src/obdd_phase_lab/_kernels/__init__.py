"""Kernel backend selection.

The hot loops (OBDD conjunction, extension-closure counting, min-fill
elimination) exist twice: a Cython extension (``_cimpl``) and a pure
Python twin (``pyimpl``). Selection happens once at import:

  OBDD_PHASE_LAB_BACKEND = auto (default) | compiled | python

With ``auto`` the compiled module is used when importable. Both
backends produce identical results; ``benchmarks/bench_kernels.py``
compares their speed.
"""

from __future__ import annotations

import os

from obdd_phase_lab._kernels import pyimpl

cimpl = None
_choice = os.environ.get("OBDD_PHASE_LAB_BACKEND", "auto")
if _choice in ("auto", "compiled", "c"):
    try:
        from obdd_phase_lab._kernels import _cimpl as cimpl  # type: ignore[no-redef]
    except ImportError:
        if _choice != "auto":
            raise
elif _choice not in ("python", "py"):
    raise ValueError(f"OBDD_PHASE_LAB_BACKEND={_choice!r} not recognized")

impl = cimpl if cimpl is not None else pyimpl
BACKEND_NAME = impl.NAME

__all__ = ["impl", "pyimpl", "cimpl", "BACKEND_NAME"]
