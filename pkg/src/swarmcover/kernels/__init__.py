"""Hot-kernel dispatch: compiled extension when available, numpy fallback
otherwise.

Set ``SWARMCOVER_KERNELS=fallback`` in the environment to force the pure
Python path (used by the benchmark and the equivalence tests).
"""

from __future__ import annotations

import os

if os.environ.get("SWARMCOVER_KERNELS", "").lower() == "fallback":
    from . import _fallback as _impl
else:
    try:
        from . import _native as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _fallback as _impl

IMPL = _impl.IMPL
label4 = _impl.label4
label8 = _impl.label8
dilate4 = _impl.dilate4
greedy_nearest = _impl.greedy_nearest
lidar_scan = _impl.lidar_scan

__all__ = ["IMPL", "label4", "label8", "dilate4", "greedy_nearest", "lidar_scan"]
