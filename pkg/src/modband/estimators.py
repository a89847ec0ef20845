"""scikit-learn style wrappers: each row of ``X`` is one period of samples."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .folding import FoldedCapture, fold_ideal
from .planner import discrete_indices, theorem1_range, theorem3_ranges
from .recovery_fourier import choose_set, partition_bins, recover_bandpass_fourier
from .recovery_time import UsAlgConfig, beta_bound, unfold_us


def _check_rows(est, X, reset):
    X = check_array(X, ensure_2d=True, dtype=float)
    if reset:
        est.n_features_in_ = X.shape[1]
    elif X.shape[1] != est.n_features_in_:
        raise ValueError(f"X has {X.shape[1]} samples per row, fitted with {est.n_features_in_}")
    return X


class ModuloFolder(TransformerMixin, BaseEstimator):
    """Elementwise ideal modulo with threshold ``lam``."""

    def __init__(self, lam=1.0):
        self.lam = lam

    def fit(self, X, y=None):
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        check_array(X, ensure_2d=False, dtype=float)
        self.fitted_ = True
        return self

    def transform(self, X):
        check_is_fitted(self)
        return fold_ideal(check_array(X, ensure_2d=False, dtype=float), self.lam)


class UnlimitedSamplingUnfolder(TransformerMixin, BaseEstimator):
    """Time-domain unfolding of ideal modulo samples.

    ``fit`` fixes the sampling grid and picks the smallest order that recovers
    every training row; ``transform`` unfolds new rows starting from that order.
    """

    def __init__(self, lam=1.0, amplitude=None, band=None, period=None, wedge=1, order=None, max_order=8):
        self.lam = lam
        self.amplitude = amplitude
        self.band = band
        self.period = period
        self.wedge = wedge
        self.order = order
        self.max_order = max_order

    def _config(self, K, X, order):
        amp = self.amplitude if self.amplitude is not None else max(float(np.max(np.abs(X))), self.lam)
        T = self.period / K if self.period else None
        return UsAlgConfig(self.lam, beta_bound(amp, self.lam), order, self.band, T, self.wedge, self.max_order)

    def fit(self, X, y=None):
        X = _check_rows(self, X, reset=True)
        K = X.shape[1]
        cfg = self._config(K, X, self.order)
        reports = [unfold_us(row, cfg) for row in X]
        self.order_ = max(r.order_used for r in reports)
        self.success_ = np.array([r.success for r in reports])
        self.plan_ = theorem1_range(self.band, self.wedge) if self.band is not None else None
        return self

    def transform(self, X):
        check_is_fitted(self, "order_")
        X = _check_rows(self, X, reset=False)
        cfg = self._config(X.shape[1], X, self.order_)
        reports = [unfold_us(row, cfg) for row in X]
        self.last_success_ = np.array([r.success for r in reports])
        return np.vstack([r.recovered for r in reports])


class FourierPronyUnfolder(TransformerMixin, BaseEstimator):
    """Fourier-domain unfolding from the out-of-band bins of the first difference."""

    def __init__(self, lam=1.0, band=None, period=1.0, folds=1, wedge=1, use_set="auto", snap_2lambda=False):
        self.lam = lam
        self.band = band
        self.period = period
        self.folds = folds
        self.wedge = wedge
        self.use_set = use_set
        self.snap_2lambda = snap_2lambda

    def fit(self, X, y=None):
        if self.band is None:
            raise ValueError("band is required")
        X = _check_rows(self, X, reset=True)
        K = X.shape[1]
        snapped = self.band.snapped(self.period)
        idx = discrete_indices(self.period, K, snapped, self.wedge)
        self.indices_ = idx
        self.partition_ = partition_bins(K, max(idx.q_low_base, 0), idx.q_high_base)
        self.set_ = choose_set(self.partition_, self.folds, self.use_set)
        outer, inner = theorem3_ranges(self.period, idx.q_low, idx.q_high, self.folds, self.wedge)
        self.plan_ = outer if self.set_ == "outer" else inner
        return self

    def transform(self, X):
        check_is_fitted(self, "partition_")
        X = _check_rows(self, X, reset=False)
        T = self.period / X.shape[1]
        out, ok = [], []
        for row in X:
            cap = FoldedCapture(row, T, "nonideal", lam=self.lam)
            rep, _ = recover_bandpass_fourier(
                cap, self.period, self.band, self.folds, self.wedge, self.set_, snap_2lambda=self.snap_2lambda
            )
            out.append(rep.recovered)
            ok.append(rep.success)
        self.last_success_ = np.array(ok)
        return np.vstack(out)
