"""Brute-force references for the test suite. Production code never imports this module."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .folding import fold_ideal
from .recovery_fourier import SpikeTrain

MAX_K = 16
MAX_FOLDS = 3
FIT_RTOL = 1e-9


@dataclass(frozen=True)
class OracleResult:
    value: object
    searched: int


def _lstsq_real(A, b):
    M = np.vstack([A.real, A.imag])
    rhs = np.concatenate([b.real, b.imag])
    c, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    return c, float(np.linalg.norm(A @ c - b))


def exhaustive_spike_fit(dft_bins, K, folds, *, with_count=False):
    """Smallest support (size <= folds) whose least-squares fit reproduces the bins.

    Every support of each size is tried in lexicographic order; the first size
    that reaches a relative residual of ``FIT_RTOL`` wins, and within it the
    minimum-residual support. Falls back to the overall best fit.
    """
    if K > MAX_K or folds > MAX_FOLDS:
        raise ValueError(f"oracle domain is K <= {MAX_K}, folds <= {MAX_FOLDS}")
    ns = np.array(sorted(int(n) for n in dft_bins))
    b = np.array([complex(dft_bins[n]) for n in ns])
    scale = float(np.linalg.norm(b))
    searched = 1
    if scale == 0.0:
        out = SpikeTrain((), (), K)
        return OracleResult(out, searched) if with_count else out
    best = (np.inf, (), ())
    for m in range(1, folds + 1):
        level = (np.inf, (), ())
        for supp in combinations(range(K), m):
            searched += 1
            A = np.exp(-2j * np.pi * np.outer(ns, supp) / K)
            c, res = _lstsq_real(A, b)
            if res < level[0]:
                level = (res, supp, c)
        if level[0] < best[0]:
            best = level
        if level[0] <= FIT_RTOL * scale:
            best = level
            break
    out = SpikeTrain(best[1], tuple(best[2]), K)
    return OracleResult(out, searched) if with_count else out


def search_space(K, folds):
    return 1 + sum(comb(K, m) for m in range(1, folds + 1))


def dense_residue(g, lam, sample_period, K):
    """``r[k] = gamma[k] - fold(gamma[k])`` straight from the signal."""
    gamma = np.asarray(g.evaluate(np.arange(K) * sample_period), dtype=float)
    return gamma - fold_ideal(gamma, lam)
