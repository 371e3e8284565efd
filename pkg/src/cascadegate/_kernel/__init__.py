"""Kernel backend selection.

The compiled extension is preferred when present; the pure-Python buffer is
a drop-in replacement producing bit-identical results. Selection can be
forced with the ``CASCADEGATE_KERNEL`` environment variable (``auto``,
``compiled`` or ``pure``).
"""

from __future__ import annotations

import os

_requested = os.environ.get("CASCADEGATE_KERNEL", "auto").strip().lower()
if _requested not in {"auto", "compiled", "pure"}:
    raise ImportError(
        f"CASCADEGATE_KERNEL must be 'auto', 'compiled' or 'pure', got {_requested!r}"
    )

KERNEL_BACKEND = "pure"
if _requested in {"auto", "compiled"}:
    try:
        from cascadegate._kernel._fastbuf import ScoreBuffer

        KERNEL_BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise
if KERNEL_BACKEND == "pure":
    from cascadegate._kernel.pure import ScoreBuffer

__all__ = ["KERNEL_BACKEND", "ScoreBuffer"]
