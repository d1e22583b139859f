"""Kernel backend selection.

Prefers the compiled extension and falls back to the pure-Python twin when it
is unavailable. Set ``SFLOCK_PURE_PYTHON=1`` to force the fallback (used by
the benchmark and the backend-agreement tests).
"""

from __future__ import annotations

import os

if os.environ.get("SFLOCK_PURE_PYTHON"):
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "python"

WEIGHT_POWER = _impl.WEIGHT_POWER
WEIGHT_SHIFTED = _impl.WEIGHT_SHIFTED
WEIGHT_REGULAR = _impl.WEIGHT_REGULAR

rhs_dvel = _impl.rhs_dvel
min_pair = _impl.min_pair
max_pair_norm = _impl.max_pair_norm
pair_gap_pow_sum = _impl.pair_gap_pow_sum
weighted_vel_pow_sum = _impl.weighted_vel_pow_sum


def backend() -> str:
    """Name of the active kernel backend: ``compiled`` or ``python``."""
    return BACKEND
