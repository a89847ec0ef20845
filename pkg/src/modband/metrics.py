"""Error metrics and the ``2 lam Z`` offset fix used against ground truth."""
from __future__ import annotations

import numpy as np


def mse(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        return 0.0
    return float(np.mean(np.abs(a - b) ** 2))


def offset_multiple(recovered, truth, lam):
    d = np.asarray(recovered, dtype=float) - np.asarray(truth, dtype=float)
    return int(np.round(np.mean(d) / (2 * lam)))


def fix_offset(recovered, truth, lam):
    """Remove the global multiple of ``2 lam`` that best aligns ``recovered`` with ``truth``."""
    recovered = np.asarray(recovered, dtype=float)
    if recovered.shape != np.shape(truth):
        raise ValueError("length mismatch")
    return recovered - 2 * lam * offset_multiple(recovered, truth, lam)
