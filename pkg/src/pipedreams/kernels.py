"""Kernel dispatch: the compiled extension when importable, numpy otherwise.

Set ``PIPEDREAMS_PURE_PYTHON=1`` to force the fallback. Both backends consume
the same counter-based draws and return identical results.
"""

from __future__ import annotations

import os

from . import _fallback

_NAMES = (
    "count_inversions",
    "apply_swaps",
    "subword_inversions",
    "pair_first_kiss",
    "psi_hitting",
    "psi_sample",
    "pipe_turns",
    "pipe_first_passage",
)

try:
    if os.environ.get("PIPEDREAMS_PURE_PYTHON"):
        raise ImportError("pure python backend requested")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"
_impl = _compiled if _compiled is not None else _fallback


def get_backend(name: str | None = None):
    """Return the kernel namespace for ``name`` ('compiled' or 'python'); default is the active one."""
    if name is None:
        return _impl
    if name == "python":
        return _fallback
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def available_backends() -> list[str]:
    return ["compiled", "python"] if _compiled is not None else ["python"]


count_inversions = _impl.count_inversions
apply_swaps = _impl.apply_swaps
subword_inversions = _impl.subword_inversions
pair_first_kiss = _impl.pair_first_kiss
psi_hitting = _impl.psi_hitting
psi_sample = _impl.psi_sample
pipe_turns = _impl.pipe_turns
pipe_first_passage = _impl.pipe_first_passage

__all__ = ["BACKEND", "get_backend", "available_backends", *_NAMES]
