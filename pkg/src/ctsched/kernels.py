"""Backend selection for the per-trial evaluation kernels.

Imports the compiled extension when available, otherwise the pure-Python
twin. ``CTSCHED_NO_EXT=1`` in the environment forces the fallback. Both
backends are kept bit-identical; ``benchmarks/bench_kernels.py`` compares
their speed and verifies agreement.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = ["BACKEND", "time_trial_ratios", "query_trial_ratios"]

if os.environ.get("CTSCHED_NO_EXT"):
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "python"


def time_trial_ratios(
    t: float, taus: np.ndarray, p: float, b: float
) -> np.ndarray:
    """Ratios at interruption ``t`` of buffered schedules built per predicted time."""
    taus = np.ascontiguousarray(taus, dtype=np.float64)
    out = np.empty(taus.shape[0])
    _impl.time_trial_ratios(float(t), taus, float(p), float(b), out)
    return out


def query_trial_ratios(
    t: float,
    n: int,
    d: float,
    pn: int,
    etas: np.ndarray,
    flip_u: np.ndarray,
) -> np.ndarray:
    """Ratios at ``t`` of the members a buffered decode picks per trial."""
    etas = np.ascontiguousarray(etas, dtype=np.float64)
    flip_u = np.ascontiguousarray(flip_u, dtype=np.float64)
    if flip_u.ndim != 2 or flip_u.shape[0] != etas.shape[0]:
        raise ValueError("flip_u must be (trials, k_max) aligned with etas")
    out = np.empty(etas.shape[0])
    _impl.query_trial_ratios(float(t), int(n), float(d), int(pn), etas, flip_u, out)
    return out
