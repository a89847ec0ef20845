"""Admissible sampling periods for modulo sampling of bandpass signals.

Every function returns closed intervals ``[t_min, t_max]`` of sampling periods in
seconds. Empty or guarded-out plans are returned with ``feasible=False`` and a
``reason`` naming the inequality that failed, instead of raising.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .exceptions import GridMismatchError, InfeasiblePlanError
from .signal_model import BandSpec

E = math.e
EMPTY_SLACK = 1e-15

REGIMES = (
    "nyquist-lemma",
    "unlimited-time",
    "fourier-inner",
    "fourier-outer",
    "am-time",
    "am-fourier",
    "us-classic",
    "fp-classic",
)


def parity(wedge):
    return "odd" if wedge % 2 else "even"


@dataclass(frozen=True)
class SamplingPlan:
    t_min: float
    t_max: float
    wedge: int
    parity: str
    regime: str
    baseband_bandwidth: float | None = None
    feasible: bool | None = None
    reason: str | None = None
    omega_s: float | None = None

    def __post_init__(self):
        if self.wedge < 1:
            raise ValueError("wedge must be >= 1")
        if self.regime not in REGIMES:
            raise ValueError(f"unknown regime {self.regime!r}")
        if self.feasible is None:
            ok = self.t_min <= self.t_max + EMPTY_SLACK
            object.__setattr__(self, "feasible", ok)
            if not ok and self.reason is None:
                object.__setattr__(
                    self, "reason", f"empty interval: t_min={self.t_min:.6g} > t_max={self.t_max:.6g}"
                )

    @property
    def empty(self):
        return not self.t_min <= self.t_max + EMPTY_SLACK

    def contains(self, t, rtol=1e-12):
        return self.t_min * (1 - rtol) <= t <= self.t_max * (1 + rtol)

    @property
    def midpoint(self):
        return 0.5 * (self.t_min + self.t_max)

    def admissible_periods(self, period):
        """Sampling periods ``period / K`` inside the plan for integer ``K``."""
        if not self.feasible or self.t_max <= 0:
            return []
        k_lo = max(1, math.ceil(period / self.t_max - 1e-9))
        k_hi = math.floor(period / self.t_min + 1e-9) if self.t_min > 0 else k_lo + 1000
        return [period / k for k in range(k_lo, k_hi + 1) if self.contains(period / k)]

    def require(self):
        if not self.feasible:
            raise InfeasiblePlanError(self.reason or "infeasible plan", self)
        return self

    def to_dict(self):
        d = asdict(self)
        d["empty"] = self.empty
        return d


@dataclass(frozen=True)
class DiscreteBandIndices:
    K: int
    q_low: int
    q_high: int
    q_high_base: int
    q_low_base: int

    @property
    def q_width(self):
        return self.q_high - self.q_low


@dataclass(frozen=True)
class WedgeBounds:
    overall: int
    odd: int
    even: int


def baseband_bandwidth(band: BandSpec, wedge, omega_s):
    """Bandwidth of the relocated baseband signal at sampling rate ``omega_s``."""
    if wedge % 2:
        return band.omega_high - (wedge - 1) / 2 * omega_s
    return wedge / 2 * omega_s - band.omega_low


def us_classic(omega, lam, beta, sample_period=None):
    """Classic unlimited-sampling period bound and difference order.

    Returns ``(t_us, n_star)``; ``n_star`` is evaluated at ``sample_period``
    (default ``t_us``).
    """
    if beta < lam:
        raise ValueError("beta must be >= lam")
    t_us = 1.0 / (2 * omega * E)
    T = t_us if sample_period is None else sample_period
    ratio = math.log(lam) - math.log(beta)
    if ratio == 0:
        return t_us, 0
    base = math.log(T * omega * E)
    if base >= 0:
        raise ValueError("T*omega*e must be < 1 for the difference bound to shrink")
    return t_us, math.ceil(ratio / base - 1e-12)


def fp_classic(period, omega, folds):
    """Fourier-Prony bound ``T <= tau/K`` with ``K >= 2(ceil(omega tau / 2pi) + M + 1)``."""
    if folds < 0:
        raise ValueError("folds must be >= 0")
    K = 2 * (math.ceil(omega * period / (2 * np.pi) - 1e-12) + folds + 1)
    return SamplingPlan(0.0, period / K, 1, "odd", "fp-classic", omega)


def min_samples_fp(period, omega, folds):
    return 2 * (math.ceil(omega * period / (2 * np.pi) - 1e-12) + folds + 1)


def lemma1_range(band: BandSpec, wedge) -> SamplingPlan:
    """Classic bandpass sampling interval ``[pi (P-1)/w_L, pi P/w_U]``."""
    if wedge < 1:
        raise ValueError("wedge must be >= 1")
    lo = np.pi * (wedge - 1) / band.omega_low
    hi = np.pi * wedge / band.omega_high
    return SamplingPlan(lo, hi, wedge, parity(wedge), "nyquist-lemma", _worst_baseband(band, wedge, lo, hi))


def theorem1_range(band: BandSpec, wedge) -> SamplingPlan:
    """Sampling interval for time-domain unfolding of ideal modulo bandpass samples."""
    if wedge < 1:
        raise ValueError("wedge must be >= 1")
    P = wedge
    if P % 2:
        lo = np.pi * (P - 1) / band.omega_low
        hi = (2 * np.pi * E * (P - 1) + 1) / (2 * E * band.omega_high)
    else:
        lo = (2 * np.pi * E * P - 1) / (2 * E * band.omega_low)
        hi = np.pi * P / band.omega_high
    return SamplingPlan(lo, hi, P, parity(P), "unlimited-time", _worst_baseband(band, P, lo, hi))


def _worst_baseband(band, wedge, t_lo, t_hi):
    # baseband width is monotone in T; report the larger endpoint value
    vals = []
    for t in (t_lo, t_hi):
        if t > 0:
            vals.append(baseband_bandwidth(band, wedge, 2 * np.pi / t))
    if wedge == 1:
        return band.omega_high
    return max(vals) if vals else None


def p_max(band: BandSpec) -> WedgeBounds:
    """Largest admissible wedge index, overall and per parity."""
    w = band.width
    if w == 0:
        big = 2**31 - 1
        return WedgeBounds(big, big, big)
    odd = math.floor(band.omega_low / (2 * np.pi * E * w) + 1)
    even = math.floor(band.omega_high / (2 * np.pi * E * w))
    return WedgeBounds(even, odd, even)


def baseband_relocation(band: BandSpec, wedge):
    """Sampling rate that relocates the passband to minimal width around DC.

    Returns ``(omega_s, omega_base)``.
    """
    if wedge < 1:
        raise ValueError("wedge must be >= 1")
    if wedge == 1:
        raise InfeasiblePlanError("no relocation; use lowpass")
    if wedge % 2:
        omega_s = 2 * band.omega_low / (wedge - 1)
    else:
        omega_s = 2 * band.omega_high / wedge
    return omega_s, baseband_bandwidth(band, wedge, omega_s)


def am_time_rate(band: BandSpec, p_am) -> SamplingPlan:
    """Carrier-aliasing rate for AM inputs and its validity flag for time-domain unfolding."""
    omega_s = (band.omega_high + band.omega_low) / (2 * p_am)
    T = 2 * np.pi / omega_s
    if band.width == 0:
        ok, reason = True, None
    else:
        ratio = (band.omega_high + band.omega_low) / band.width
        ok = ratio >= 4 * np.pi * E * p_am
        reason = None if ok else f"(wU+wL)/(wU-wL) = {ratio:.4g} < 4*pi*e*P_AM = {4 * np.pi * E * p_am:.4g}"
    return SamplingPlan(T, T, 2 * p_am, "even", "am-time", band.width / 2, ok, reason, omega_s)


def _interval(lo, hi, guard_ok, guard_reason, **kw):
    if not guard_ok:
        return SamplingPlan(lo, hi, feasible=False, reason=guard_reason, **kw)
    return SamplingPlan(lo, hi, **kw)


def theorem3_ranges(period, q_low, q_high, folds, wedge):
    """Outer-set and inner-set sampling intervals for Fourier-domain unfolding.

    Returns ``(outer_plan, inner_plan)``.
    """
    tau, QL, QU, M, P = float(period), int(q_low), int(q_high), int(folds), int(wedge)
    if P < 1:
        raise ValueError("wedge must be >= 1")
    a = QL - M - 1
    guard = f"Q_L = {QL} must exceed M + 1 = {M + 1}"
    inf = math.inf

    def lower_a():
        return (P - 1) * tau / (2 * a) if a > 0 else inf

    def lower_q():
        return (P - 1) * tau / (2 * QL) if QL > 0 else (0.0 if P == 1 else inf)

    up_m = P * tau / (2 * (QU + M + 1))
    up_q = P * tau / (2 * QU)
    common = dict(wedge=P, parity=parity(P))
    if P % 2:
        outer = _interval(lower_q(), up_m, P == 1 or a > 0, guard, regime="fourier-outer", **common)
        if P == 1:
            inner = _interval(0.0, up_q, QL >= M + 1, f"P=1 inner set needs Q_L >= M + 1 = {M + 1}",
                              regime="fourier-inner", **common)
        else:
            inner = _interval(lower_a(), up_q, a > 0, guard, regime="fourier-inner", **common)
    else:
        outer = _interval(lower_a(), up_q, a > 0, guard, regime="fourier-outer", **common)
        inner = _interval(lower_q(), up_m, a > 0, guard, regime="fourier-inner", **common)
    return outer, inner


def am_fourier_rate(period, band: BandSpec, folds, p_am) -> SamplingPlan:
    """Carrier-aliasing rate for AM inputs with Fourier-domain unfolding."""
    omega_s = (band.omega_high + band.omega_low) / (2 * p_am)
    x = period * band.omega_low / (2 * np.pi)
    q_low = round(x) if abs(x - round(x)) < 1e-9 * max(1, x) else math.floor(x)
    upper = 4 * np.pi * (q_low - folds - 1) / (period * (2 * p_am - 1))
    ok = band.width <= omega_s <= upper
    reason = None
    if not ok:
        reason = (
            f"need w_UL = {band.width:.6g} <= w_S = {omega_s:.6g} <= {upper:.6g}"
        )
    T = 2 * np.pi / omega_s
    plan = SamplingPlan(T, T, 2 * p_am, "even", "am-fourier", band.width / 2, ok, reason, omega_s)
    return plan


def am_fourier_upper(period, band: BandSpec, folds, p_am):
    x = period * band.omega_low / (2 * np.pi)
    q_low = round(x) if abs(x - round(x)) < 1e-9 * max(1, x) else math.floor(x)
    return 4 * np.pi * (q_low - folds - 1) / (period * (2 * p_am - 1))


def _as_int(x, what):
    n = round(x)
    if abs(x - n) > 1e-9 * max(1.0, abs(x)):
        raise GridMismatchError(f"{what} = {x:.12g} is not an integer")
    return int(n)


def discrete_indices(period, K, band: BandSpec, wedge) -> DiscreteBandIndices:
    """Band-edge DFT indices and their baseband images for ``K`` samples per period."""
    omega_s = 2 * np.pi * K / period
    q_low = _as_int(K * band.omega_low / omega_s, "Q_L")
    q_high = _as_int(K * band.omega_high / omega_s, "Q_U")
    if wedge % 2:
        qg = q_high - (wedge - 1) * K // 2 if (wedge - 1) * K % 2 == 0 else None
        if qg is None:
            raise GridMismatchError("(P-1)K/2 must be an integer")
    else:
        if (wedge * K) % 2:
            raise GridMismatchError("PK/2 must be an integer")
        qg = wedge * K // 2 - q_low
    return DiscreteBandIndices(K, q_low, q_high, qg, qg - (q_high - q_low))


def enumerate_plans(band: BandSpec, regime="unlimited-time"):
    """Plans for every wedge up to the admissible maximum."""
    fn = {"unlimited-time": theorem1_range, "nyquist-lemma": lemma1_range}[regime]
    bounds = p_max(band)
    top = max(bounds.odd, bounds.even, 1)
    if regime == "nyquist-lemma":
        top = max(1, math.floor(band.omega_high / band.width)) if band.width else 1
    return [fn(band, P) for P in range(1, top + 1)]


def wedge_for(band: BandSpec, sample_period):
    """Wedge index whose bandpass interval contains ``sample_period`` (0 if none)."""
    omega_s = 2 * np.pi / sample_period
    P = math.floor(2 * band.omega_low / omega_s + 1e-9) + 1
    return P if lemma1_range(band, P).contains(sample_period) else 0
