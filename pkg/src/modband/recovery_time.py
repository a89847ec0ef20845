"""Time-domain unfolding by higher-order differences (ideal and hysteresis modulo)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .demodulation import SampledSpectrum, SpectralSelector, band_select
from .exceptions import InsufficientDataError, UnsupportedModeError
from .folding import FoldedCapture, HysteresisParams, fold_ideal, round_to_grid
from .metrics import fix_offset, mse, offset_multiple
from .planner import baseband_bandwidth, lemma1_range
from .signal_model import BandSpec

E = math.e
MAX_ORDER = 8
# success thresholds, in units of the rounding threshold
PERIODICITY_TOL = 1e-6
OUT_OF_BAND_TOL = 1e-6


@dataclass(frozen=True)
class UsAlgConfig:
    lam: float
    beta: float
    order: int | None = None
    band: BandSpec | None = None
    sample_period: float | None = None
    wedge: int = 1
    max_order: int = MAX_ORDER
    periodic: bool = True

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        if self.beta < self.lam:
            raise ValueError("beta must be >= lam")
        if self.order is not None and self.order < 1:
            raise ValueError("order must be >= 1")

    @property
    def omega_base(self):
        """Baseband bandwidth used by the order formula (None if unknown)."""
        if self.band is None or self.sample_period is None:
            return None
        if self.wedge == 1:
            return self.band.omega_high
        w = baseband_bandwidth(self.band, self.wedge, 2 * np.pi / self.sample_period)
        return w if w > 0 else None

    def formula_order(self):
        omega = self.omega_base
        if omega is None:
            return None
        base = self.sample_period * omega * E
        if not 0 < base < 1:
            return None
        n = math.ceil((math.log(self.lam) - math.log(self.beta)) / math.log(base) - 1e-12)
        return max(n, 1)

    def candidate_orders(self):
        if self.order is not None:
            first = [self.order]
        else:
            n = self.formula_order()
            first = [n] if n is not None and n <= self.max_order else []
        rest = [n for n in range(2, self.max_order + 1) if n not in first]
        return first + rest


@dataclass
class RecoveryReport:
    recovered: np.ndarray
    lam: float
    success: bool
    order_used: int | None = None
    offset_multiple: int | None = None
    mse: float | None = None
    diagnostics: dict = field(default_factory=dict)
    signal: object = None

    @property
    def aligned(self):
        """Recovered samples with the ground-truth offset removed (when known)."""
        m = self.offset_multiple or 0
        return self.recovered - 2 * self.lam * m

    def to_dict(self):
        return {
            "success": bool(self.success),
            "order_used": self.order_used,
            "mse": self.mse,
            "offset_multiple": self.offset_multiple,
        }


def beta_bound(amplitude, lam):
    """Smallest multiple of ``2 lam`` that is ``>= amplitude`` (and ``>= lam``)."""
    return max(2 * lam * math.ceil(amplitude / (2 * lam) - 1e-12), 2 * lam)


def antidiff(x):
    """Partial sums with a leading zero, so ``diff(antidiff(x)) == x``."""
    out = np.empty(len(x) + 1)
    out[0] = 0.0
    np.cumsum(x, out=out[1:])
    return out


def band_bins(K, period, band: BandSpec):
    """DFT bins of a ``K``-sample capture that may hold energy of a signal in ``band``.

    DC is always included because it carries the unresolved offset.
    """
    step = 2 * np.pi / period
    lo = math.floor(band.omega_low / step + 1e-9)
    hi = math.ceil(band.omega_high / step - 1e-9)
    bins = {0}
    for n in range(lo, hi + 1):
        bins.add(n % K)
        bins.add(-n % K)
    return bins


def out_of_band_rms(x, period, band):
    K = len(x)
    X = np.fft.fft(x) / K
    mask = np.ones(K, dtype=bool)
    mask[list(band_bins(K, period, band))] = False
    if not mask.any():
        return 0.0
    return float(np.sqrt(np.sum(np.abs(X[mask]) ** 2)))


def grid_distance(x, lam):
    """Largest distance of ``x / 2 lam`` from an integer."""
    q = np.asarray(x, dtype=float) / (2 * lam)
    return float(np.max(np.abs(q - np.round(q)), initial=0.0))


def _unfold_order(y_ext, lam, beta, N, J):
    d = np.diff(y_ext, N)
    s = fold_ideal(d, lam) - d
    for _ in range(N - 1):
        s = round_to_grid(antidiff(s), lam)
        v = antidiff(s)
        # an unknown constant c in s becomes a ramp c*k one level up; read it off at index J
        kappa = math.floor((v[0] - v[J]) / (2 * lam * J) + 0.5)
        s = s + 2 * lam * kappa
    return antidiff(s)


def unfold_us(y, cfg: UsAlgConfig, *, truth=None) -> RecoveryReport:
    """Recover ``gamma = y + r`` with ``r`` in ``2 lam Z`` by inverting ``N``-th differences.

    The capture is treated as one period and extended periodically so that the
    ``kappa`` window fits. Each candidate order is accepted when the unfolded
    extension is periodic and, with a known band, has no out-of-band energy.
    """
    y = np.asarray(y, dtype=float)
    K = y.size
    lam, beta = cfg.lam, cfg.beta
    J = max(1, math.ceil(6 * beta / lam - 1e-9))
    orders = cfg.candidate_orders()
    need = J + max(orders) + 2
    if K < 2:
        raise InsufficientDataError("need at least two samples")
    if not cfg.periodic and K < need:
        raise InsufficientDataError(f"need at least {need} samples for the kappa window, got {K}")
    L = max(need, 2 * K) if cfg.periodic else K
    y_ext = y[np.arange(L) % K]
    period = K * cfg.sample_period if cfg.sample_period else None

    tried = []
    best = None
    for N in orders:
        if N + 2 > L:
            continue
        r_ext = _unfold_order(y_ext, lam, beta, N, J)
        g_ext = y_ext + r_ext
        if cfg.periodic:
            per = float(np.max(np.abs(g_ext[K:] - g_ext[:-K]))) / lam
        else:
            per = 0.0
        oob = None
        if cfg.band is not None and period is not None:
            oob = out_of_band_rms(g_ext[:K], period, cfg.band) / lam
        ok = per <= PERIODICITY_TOL and (oob is None or oob <= OUT_OF_BAND_TOL)
        tried.append({"order": N, "periodicity": per, "out_of_band": oob, "ok": ok})
        if best is None or ok:
            best = (N, g_ext[:K], ok)
        if ok:
            break

    N, gamma, ok = best
    rt = grid_distance(gamma - y, lam)
    diag = {"tried": tried, "kappa_window": J, "extended_length": L, "roundtrip": rt}
    report = RecoveryReport(gamma, lam, bool(ok), N, diagnostics=diag)
    if truth is not None:
        _score(report, truth)
    return report


def _score(report, truth):
    truth = np.asarray(truth, dtype=float)
    report.offset_multiple = offset_multiple(report.recovered, truth, report.lam)
    report.mse = mse(fix_offset(report.recovered, truth, report.lam), truth)
    return report


def _demodulate(report, capture, band, wedge, keep_dc=False):
    """Band-select the unfolded samples; None when the sampling rate violates the bandpass lemma."""
    if band is None:
        return None
    T = capture.sample_period
    period = capture.period
    try:
        snapped = band.snapped(period)
    except ValueError:
        return None
    plan = lemma1_range(snapped, wedge)
    if not plan.contains(T):
        report.diagnostics["demodulation"] = (
            f"T_S={T:.6g} outside the bandpass interval for P={wedge}; "
            "use baseband interpolation and remodulation"
        )
        return None
    samples = report.aligned if keep_dc else report.recovered
    sel = SpectralSelector(2 * np.pi / T, wedge)
    return band_select(SampledSpectrum(samples, period), sel, snapped, keep_dc=keep_dc)


def recover_bandpass_time(capture: FoldedCapture, cfg: UsAlgConfig, wedge=None):
    """Unfold a bandpass capture in time and relocate it back to its passband.

    Returns ``(report, signal)``; ``signal`` is None when the samples do not
    determine the passband coefficients (e.g. carrier-aliasing AM rates).
    """
    P = cfg.wedge if wedge is None else wedge
    if cfg.sample_period is None or P != cfg.wedge:
        cfg = _replace(cfg, sample_period=capture.sample_period, wedge=P)
    report = unfold_us(capture.samples, cfg, truth=capture.ground_truth)
    report.diagnostics["omega_base"] = cfg.omega_base
    report.signal = _demodulate(report, capture, cfg.band, P, keep_dc=capture.ground_truth is not None)
    return report, report.signal


def _replace(cfg, **kw):
    from dataclasses import replace

    return replace(cfg, **kw)


def recover_generalized(capture: FoldedCapture, H: HysteresisParams, beta, band=None, wedge=1, order=None):
    """Time-domain unfolding of a hysteresis-modulo capture on the ``2 lam_h`` grid.

    The residue of such a capture jumps by ``2 lam_h``, so the samples need not
    lie in ``[-lam_h, lam_h)``; the relocated signal (if any) is ``report.signal``.
    """
    if H.transient > 0:
        raise UnsupportedModeError("recovery with a non-zero transient is not implemented")
    lam_h = H.lambda_h
    cfg = UsAlgConfig(
        lam=lam_h,
        beta=max(beta, lam_h),
        order=order,
        band=band,
        sample_period=capture.sample_period,
        wedge=wedge,
    )
    report = unfold_us(capture.samples, cfg, truth=capture.ground_truth)
    report.diagnostics["omega_base"] = cfg.omega_base
    report.signal = _demodulate(report, capture, band, wedge, keep_dc=capture.ground_truth is not None)
    return report
