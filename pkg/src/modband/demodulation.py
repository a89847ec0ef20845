"""Spectral relocation between baseband and passband.

The spectrum of a sampled ``tau``-periodic sequence is periodic in the harmonic
index with period ``K``; :class:`SampledSpectrum` exposes it on the ``2 pi / tau``
grid so that band selection and lowpass extraction are plain index filters.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import GridMismatchError, IllConditionedError
from .signal_model import BandSpec, FourierSeries, PeriodicBandpassSignal, harmonic_index


@dataclass(frozen=True)
class SampledSpectrum:
    """Fourier-series view of the impulse-sampled sequence ``gamma_delta``.

    ``coeff(n)`` is ``DFT[n mod K] / K`` so that the coefficient of a harmonic equals
    the sum of every true coefficient aliasing onto its bin.
    """

    samples: np.ndarray
    period: float

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=float))

    @property
    def K(self):
        return self.samples.size

    @property
    def bins(self):
        return np.fft.fft(self.samples) / self.K

    def coeff(self, n):
        return complex(self.bins[int(n) % self.K])

    @property
    def omega_s(self):
        return 2 * np.pi * self.K / self.period


@dataclass(frozen=True)
class SpectralSelector:
    """Indicator of ``D(omega_s, P)``: the band ``[(P-1) omega_s / 2, P omega_s / 2]`` and its mirror."""

    omega_s: float
    wedge: int

    def __post_init__(self):
        if self.wedge < 1:
            raise ValueError("wedge must be >= 1")
        if not self.omega_s > 0:
            raise ValueError("omega_s must be positive")

    @property
    def low(self):
        return (self.wedge - 1) * self.omega_s / 2

    @property
    def high(self):
        return self.wedge * self.omega_s / 2

    @property
    def measure(self):
        return 2 * (self.high - self.low)

    def contains(self, omega):
        w = np.abs(np.asarray(omega, dtype=float))
        tol = 1e-12 * self.high
        return (w >= self.low - tol) & (w <= self.high + tol)

    def harmonic_range(self, period):
        """Inclusive positive harmonic range ``(n_lo, n_hi)`` covered on the ``2 pi / period`` grid."""
        step = 2 * np.pi / period
        harmonic_index(self.omega_s, period)
        lo, hi = self.low / step, self.high / step
        return math.ceil(lo - 1e-9), math.floor(hi + 1e-9)


def _self_conjugate(q, K):
    return (2 * q) % K == 0


def band_select(spectrum, sel: SpectralSelector, band: BandSpec | None = None, keep_dc=False):
    """Keep the coefficients whose frequency lies in ``D(omega_s, P)``.

    For a :class:`SampledSpectrum`, a harmonic whose bin is its own mirror image
    (DC or Nyquist) only carries ``c_n + c_-n``; its value is split evenly, which
    recovers the real part of the true coefficient. The DC bin also holds the
    ``2 lam Z`` offset of an unfolded sequence, so it is skipped for ``P > 1``
    unless ``keep_dc`` is set. ``band`` further restricts the output support and
    becomes the band of the returned signal.
    """
    period = spectrum.period
    n_lo, n_hi = sel.harmonic_range(period)
    if band is not None:
        b_lo, b_hi = band.harmonics(period)
        n_lo, n_hi = max(n_lo, b_lo), min(n_hi, b_hi)
    coeffs = {}
    if isinstance(spectrum, SampledSpectrum):
        K = spectrum.K
        X = spectrum.bins
        for n in range(max(n_lo, 0), n_hi + 1):
            q = n % K
            if q == 0 and sel.wedge > 1 and not keep_dc:
                continue
            if n == 0:
                coeffs[0] = complex(X[0].real)
                continue
            c = X[q] / 2 if _self_conjugate(q, K) else X[q]
            if _self_conjugate(q, K):
                c = complex(c.real)
            coeffs[n] = complex(c)
            coeffs[-n] = complex(c).conjugate()
    else:
        for n, c in spectrum.coeffs.items():
            if n_lo <= abs(n) <= n_hi:
                coeffs[n] = c
    if band is None:
        step = 2 * np.pi / period
        band = BandSpec(max(n_lo, 1) * step, max(n_hi, 1) * step)
    # a bandpass signal has no DC term; it only ever carries the fold offset here
    coeffs.pop(0, None)
    return PeriodicBandpassSignal(period, coeffs, band)


def lowpass_extract(spectrum, omega_s):
    """Baseband series keeping ``|omega| <= omega_s / 2``.

    For sampled input this is the trigonometric interpolant, whose samples
    reproduce the original sequence.
    """
    if isinstance(spectrum, SampledSpectrum):
        if not math.isclose(spectrum.omega_s, omega_s, rel_tol=1e-9):
            raise GridMismatchError("omega_s does not match the sampled spectrum")
        return FourierSeries.from_samples(spectrum.samples, spectrum.period)
    half = omega_s / 2 * (1 + 1e-12)
    step = 2 * np.pi / spectrum.period
    return FourierSeries(spectrum.period, {n: c for n, c in spectrum.coeffs.items() if abs(n) * step <= half})


def relocate(sig: FourierSeries, sample_period):
    """Baseband relocation ``g`` of ``sig`` sampled every ``sample_period`` seconds."""
    K = round(sig.period / sample_period)
    if abs(K * sample_period - sig.period) > 1e-9 * sig.period:
        raise GridMismatchError("period must be an integer number of samples")
    samples = sig.evaluate(np.arange(K) * sample_period)
    return lowpass_extract(SampledSpectrum(samples, sig.period), 2 * np.pi / sample_period)


def sinc_interpolate(samples, omega, times, *, periodic=False):
    """``sum_k y[k] sinc(omega (t - k T))`` with ``T = pi / omega``.

    With ``periodic=True`` the samples are treated as one period of a periodic
    sequence and the Dirichlet kernel replaces the truncated sinc sum.
    """
    y = np.asarray(samples, dtype=float)
    t = np.asarray(times, dtype=float)
    T = np.pi / omega
    if periodic:
        return FourierSeries.from_samples(y, y.size * T).evaluate(t)
    k = np.arange(y.size)
    return np.sinc(np.subtract.outer(t / T, k)) @ y


def am_remodulate(baseband, omega_c, theta_c, times):
    """``g(t) sin(omega_c t + theta_c) / sin(theta_c)``.

    ``baseband`` is a signal with ``evaluate``, a callable, or values already taken at ``times``.
    """
    s = math.sin(theta_c)
    if abs(s) < 1e-6:
        raise IllConditionedError(f"|sin(theta_c)| = {abs(s):.3e} is too small to divide by")
    t = np.asarray(times, dtype=float)
    if hasattr(baseband, "evaluate"):
        g = baseband.evaluate(t)
    elif callable(baseband):
        g = np.asarray(baseband(t), dtype=float)
    else:
        g = np.asarray(baseband, dtype=float)
    return g * np.sin(omega_c * t + theta_c) / s
