"""Kernel backend selection.

The compiled extension is preferred; the numpy fallback keeps the package
fully functional without a compiler.  `SEMIVALUES_KERNELS` overrides the
choice: `auto` (default), `compiled` (fail if unavailable) or `python`.
"""

from __future__ import annotations

import os

import numpy as np

_requested = os.environ.get("SEMIVALUES_KERNELS", "auto").lower()
if _requested not in ("auto", "compiled", "python"):
    raise RuntimeError(f"SEMIVALUES_KERNELS must be auto, compiled or python, "
                       f"got {_requested!r}")

if _requested == "python":
    from . import _kernels_py as _impl
    COMPILED = False
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
        COMPILED = True
    except ImportError:
        if _requested == "compiled":
            raise
        from . import _kernels_py as _impl
        COMPILED = False


def kernel_backend() -> str:
    return "compiled" if COMPILED else "python"


def sou_eval(term_words, alphas, subset_words) -> np.ndarray:
    term_words = np.ascontiguousarray(term_words, dtype=np.uint64)
    subset_words = np.ascontiguousarray(subset_words, dtype=np.uint64)
    alphas = np.ascontiguousarray(alphas, dtype=np.float64)
    return _impl.sou_eval(term_words, alphas, subset_words)


def accumulate_buckets(members, sizes, values,
                       plus_sum, plus_cnt, minus_sum, minus_cnt) -> None:
    sizes = np.ascontiguousarray(sizes, dtype=np.int64)
    values = np.ascontiguousarray(values, dtype=np.float64)
    members = np.ascontiguousarray(members)
    if COMPILED:
        members = members.view(np.uint8)
    _impl.accumulate_buckets(members, sizes, values,
                             plus_sum, plus_cnt, minus_sum, minus_cnt)
