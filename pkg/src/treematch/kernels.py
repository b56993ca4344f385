"""Kernel backend selection.

The compiled extension is used when it imports; setting the environment
variable ``TREEMATCH_PURE=1`` forces the pure-Python fallback.
"""

from __future__ import annotations

import os

if os.environ.get("TREEMATCH_PURE", "") not in ("", "0"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:  # pragma: no cover - depends on the build
        from . import _kernels_py as _impl

BACKEND: str = _impl.BACKEND
build_csr = _impl.build_csr
dfs_preorder = _impl.dfs_preorder
match_forest = _impl.match_forest
residual_match = _impl.residual_match
residual_beta = _impl.residual_beta
lL_values = _impl.lL_values
peel = _impl.peel
elementary_scan = _impl.elementary_scan
alternate_swap = _impl.alternate_swap

__all__ = [
    "BACKEND",
    "build_csr",
    "dfs_preorder",
    "match_forest",
    "residual_match",
    "residual_beta",
    "lL_values",
    "peel",
    "elementary_scan",
    "alternate_swap",
]
