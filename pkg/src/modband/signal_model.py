"""Periodic bandpass and AM test signals stored as sparse Fourier series.

A signal of period ``tau`` is ``g(t) = sum_n c_n exp(j 2 pi n t / tau)``. Only
the non-zero harmonics are stored, which keeps narrow passbands cheap.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from .exceptions import ConjugateSymmetryError, GridMismatchError

GRID_TOL = 1e-9
IMAG_TOL = 1e-10
DEFAULT_OVERSAMPLE = 128


def harmonic_index(omega, period, *, tol=GRID_TOL):
    """Return the integer ``n`` with ``omega == 2 pi n / period``.

    Raises GridMismatchError when ``omega`` is not on the harmonic grid.
    """
    x = omega * period / (2 * np.pi)
    n = int(round(x))
    if abs(x - n) > tol * max(1.0, abs(x)):
        raise GridMismatchError(
            f"omega={omega!r} is not a multiple of 2*pi/{period!r} (ratio {x:.12g})"
        )
    return n


def make_rng(seed):
    """Counter-based Philox stream keyed by an int or a sequence of ints."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


@dataclass(frozen=True)
class BandSpec:
    """Passband ``[omega_low, omega_high]`` in rad/s."""

    omega_low: float
    omega_high: float

    def __post_init__(self):
        lo, hi = float(self.omega_low), float(self.omega_high)
        if not (lo > 0 and hi >= lo):
            raise ValueError(f"need 0 < omega_low <= omega_high, got ({lo}, {hi})")
        object.__setattr__(self, "omega_low", lo)
        object.__setattr__(self, "omega_high", hi)

    @property
    def width(self):
        return self.omega_high - self.omega_low

    @property
    def center(self):
        return 0.5 * (self.omega_high + self.omega_low)

    def harmonics(self, period):
        """Harmonic indices ``(n_low, n_high)`` of the band edges; both must be on grid."""
        return harmonic_index(self.omega_low, period), harmonic_index(self.omega_high, period)

    def snapped(self, period):
        """Smallest on-grid band containing this one (edges rounded outward)."""
        step = 2 * np.pi / period
        lo = self.omega_low / step
        hi = self.omega_high / step
        n_lo = round(lo) if abs(lo - round(lo)) <= GRID_TOL * max(1, lo) else math.floor(lo)
        n_hi = round(hi) if abs(hi - round(hi)) <= GRID_TOL * max(1, hi) else math.ceil(hi)
        return BandSpec(max(n_lo, 1) * step, n_hi * step)

    def as_list(self):
        return [self.omega_low, self.omega_high]


@dataclass(frozen=True, eq=False)
class FourierSeries:
    """Real-valued ``period``-periodic signal given by harmonic coefficients."""

    period: float
    coeffs: Mapping[int, complex] = field(default_factory=dict)

    def __post_init__(self):
        if not self.period > 0:
            raise ValueError("period must be positive")
        clean = {int(n): complex(c) for n, c in dict(self.coeffs).items() if c != 0}
        object.__setattr__(self, "coeffs", MappingProxyType(clean))

    def coeff(self, n):
        return self.coeffs.get(int(n), 0j)

    @property
    def n_max(self):
        return max((abs(n) for n in self.coeffs), default=0)

    @property
    def fundamental(self):
        return 2 * np.pi / self.period

    def check_symmetry(self, tol=IMAG_TOL):
        scale = max(1.0, sum(abs(c) for c in self.coeffs.values()))
        for n, c in self.coeffs.items():
            if abs(c - np.conj(self.coeff(-n))) > tol * scale:
                raise ConjugateSymmetryError(f"coeff({-n}) != conj(coeff({n}))")

    def evaluate(self, times):
        """Sample the series at ``times``; the imaginary residual must vanish."""
        t = np.asarray(times, dtype=float)
        if not self.coeffs:
            return np.zeros_like(t)
        ns = np.fromiter(self.coeffs.keys(), dtype=float)
        cs = np.fromiter(self.coeffs.values(), dtype=complex)
        phase = np.multiply.outer(t, ns) * (2 * np.pi / self.period)
        vals = np.exp(1j * phase) @ cs
        scale = max(1.0, float(np.abs(cs).sum()))
        resid = float(np.max(np.abs(vals.imag), initial=0.0))
        if resid > IMAG_TOL * scale:
            raise ConjugateSymmetryError(f"imaginary residual {resid:.3e} in evaluate()")
        return vals.real

    __call__ = evaluate

    def energy(self):
        return float(sum(abs(c) ** 2 for c in self.coeffs.values()))

    def scaled(self, factor):
        return type(self)._rebuild(self, {n: c * factor for n, c in self.coeffs.items()})

    @classmethod
    def _rebuild(cls, template, coeffs):
        return cls(template.period, coeffs)

    @classmethod
    def from_samples(cls, samples, period):
        """Trigonometric interpolant of one period of uniform samples.

        Bins map to harmonics in ``[-K/2, K/2]``; a Nyquist bin (even K) is
        split evenly between ``+K/2`` and ``-K/2``.
        """
        y = np.asarray(samples, dtype=float)
        K = y.size
        X = np.fft.fft(y) / K
        coeffs = {}
        for q in range(K):
            n = q if q <= K // 2 else q - K
            if K % 2 == 0 and q == K // 2:
                coeffs[K // 2] = X[q] / 2
                coeffs[-K // 2] = X[q] / 2
            else:
                coeffs[n] = X[q]
        return FourierSeries(period, coeffs)


@dataclass(frozen=True, eq=False)
class PeriodicBandpassSignal(FourierSeries):
    """Fourier series whose non-zero harmonics all lie inside ``band``."""

    band: BandSpec | None = None

    def __post_init__(self):
        super().__post_init__()
        if self.band is None:
            raise ValueError("band is required")
        n_lo, n_hi = self.band.harmonics(self.period)
        for n in self.coeffs:
            if not n_lo <= abs(n) <= n_hi:
                raise GridMismatchError(f"harmonic {n} lies outside the band [{n_lo}, {n_hi}]")
        self.check_symmetry()

    @classmethod
    def _rebuild(cls, template, coeffs):
        return cls(template.period, coeffs, template.band)

    def to_dict(self):
        return {
            "period": self.period,
            "band": self.band.as_list(),
            "coeffs": [[n, c.real, c.imag] for n, c in sorted(self.coeffs.items())],
        }

    @classmethod
    def from_dict(cls, d):
        coeffs = {int(n): complex(re, im) for n, re, im in d["coeffs"]}
        return cls(float(d["period"]), coeffs, BandSpec(*d["band"]))


@dataclass(frozen=True)
class AmParams:
    """Parameters of ``amp (1 + cos(w_m t + th_m)) sin(w_c t + th_c)``."""

    amp: float
    omega_msg: float
    phase_msg: float
    omega_carrier: float
    phase_carrier: float

    def __post_init__(self):
        if not self.omega_carrier > self.omega_msg > 0:
            raise ValueError("need omega_carrier > omega_msg > 0")

    @property
    def band(self):
        return BandSpec(self.omega_carrier - self.omega_msg, self.omega_carrier + self.omega_msg)

    def evaluate(self, times):
        t = np.asarray(times, dtype=float)
        return (
            self.amp
            * (1 + np.cos(self.omega_msg * t + self.phase_msg))
            * np.sin(self.omega_carrier * t + self.phase_carrier)
        )

    def snapped(self, period):
        """Copy with both frequencies moved to the nearest harmonic of ``period``."""
        step = 2 * np.pi / period
        m = max(1, round(self.omega_msg / step))
        c = max(m + 1, round(self.omega_carrier / step))
        return AmParams(self.amp, m * step, self.phase_msg, c * step, self.phase_carrier)


def sup_norm(sig, oversample_factor=DEFAULT_OVERSAMPLE):
    """Grid estimate of ``max |g(t)|`` over one period."""
    if oversample_factor < 8:
        raise ValueError("oversample_factor must be >= 8")
    if not sig.coeffs:
        return 0.0
    npts = oversample_factor * 2 * max(sig.n_max, 1)
    t = np.arange(npts) * (sig.period / npts)
    return float(np.max(np.abs(sig.evaluate(t))))


def evaluate(sig, times):
    return sig.evaluate(times)


def synth_random_bandpass(band, period, seed, *, oversample_factor=DEFAULT_OVERSAMPLE):
    """Random bandpass signal with coefficients ``100 U0 + 120j U1`` on every in-band harmonic.

    The result is scaled so its grid sup-norm equals one.
    """
    n_lo, n_hi = band.harmonics(period)
    rng = make_rng(seed)
    ns = np.arange(n_lo, n_hi + 1)
    u = rng.random((ns.size, 2))
    coeffs = {}
    for n, (u0, u1) in zip(ns, u):
        c = complex(100 * u0, 120 * u1)
        coeffs[int(n)] = c
        coeffs[-int(n)] = c.conjugate()
    sig = PeriodicBandpassSignal(period, coeffs, band)
    return sig.scaled(1.0 / sup_norm(sig, oversample_factor))


def synth_am(p: AmParams, period: float) -> PeriodicBandpassSignal:
    """Exact five-line Fourier expansion of the AM waveform."""
    n_m = harmonic_index(p.omega_msg, period)
    n_c = harmonic_index(p.omega_carrier, period)
    band = BandSpec(p.omega_carrier - p.omega_msg, p.omega_carrier + p.omega_msg)
    coeffs = {}
    if p.amp != 0:
        lines = {
            n_c: p.amp * np.exp(1j * p.phase_carrier),
            n_c + n_m: 0.5 * p.amp * np.exp(1j * (p.phase_carrier + p.phase_msg)),
            n_c - n_m: 0.5 * p.amp * np.exp(1j * (p.phase_carrier - p.phase_msg)),
        }
        for n, a in lines.items():
            c = complex(a / 2j)
            coeffs[n] = coeffs.get(n, 0j) + c
            coeffs[-n] = coeffs.get(-n, 0j) + c.conjugate()
    return PeriodicBandpassSignal(period, coeffs, band)


def sample(sig, sample_period, count, start=0.0):
    """Uniform samples ``sig(start + k T)`` for ``k = 0..count-1``."""
    return sig.evaluate(start + np.arange(count) * sample_period)


def samples_per_period(period, sample_period, *, tol=GRID_TOL) -> int:
    """``K = period / sample_period``, which must be an integer."""
    x = period / sample_period
    K = int(round(x))
    if K < 1 or abs(x - K) > tol * max(1.0, x):
        raise GridMismatchError(f"period/sample_period = {x:.12g} is not an integer")
    return K


def coefficient_table(sig: FourierSeries, ns: Sequence[int]):
    return np.array([sig.coeff(n) for n in ns], dtype=complex)
