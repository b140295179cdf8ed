"""Kernel backend selection.

The compiled extension is used when it was built and importable; the
pure-Python module is the fallback.  Setting ``BIHOMLC_PURE_PYTHON=1``
forces the fallback (useful for benchmarking and debugging).
"""

from __future__ import annotations

import os

if os.environ.get("BIHOMLC_PURE_PYTHON", "") not in ("", "0"):
    from ._kernels_py import add_terms, mul_terms, nullspace, rref

    BACKEND = "python"
else:
    try:
        from ._ckernels import add_terms, mul_terms, nullspace, rref

        BACKEND = "cython"
    except ImportError:
        from ._kernels_py import add_terms, mul_terms, nullspace, rref

        BACKEND = "python"

from ._kernels_py import EXP_BITS, EXP_MASK

__all__ = ["BACKEND", "EXP_BITS", "EXP_MASK", "add_terms", "mul_terms", "nullspace", "rref"]
