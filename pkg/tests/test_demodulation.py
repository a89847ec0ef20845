import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import EVEN_CASE, ODD_CASE, bandpass_case
from modband import (
    AmParams,
    BandSpec,
    FourierSeries,
    IllConditionedError,
    SampledSpectrum,
    SpectralSelector,
    am_remodulate,
    band_select,
    lowpass_extract,
    relocate,
    sinc_interpolate,
    synth_am,
    synth_random_bandpass,
)

PI = math.pi


def test_selector_geometry():
    sel = SpectralSelector(25 * PI, 5)
    assert (sel.low, sel.high) == pytest.approx((50 * PI, 62.5 * PI))
    assert sel.measure == pytest.approx(25 * PI)
    assert sel.contains(-51 * PI) and not sel.contains(49 * PI)
    low = SpectralSelector(10.0, 1)
    assert low.low == 0.0 and low.high == 5.0
    with pytest.raises(ValueError):
        SpectralSelector(10.0, 0)


def test_lowpass_selection_is_identity_inside_nyquist_band():
    sig = FourierSeries(1.0, {2: 1 + 1j, -2: 1 - 1j, 3: 0.5, -3: 0.5})
    out = band_select(sig, SpectralSelector(2 * PI * 10, 1), BandSpec(4 * PI, 6 * PI))
    assert dict(out.coeffs) == dict(sig.coeffs)


def test_relocated_band_restored_at_original_harmonics():
    sig = synth_random_bandpass(BandSpec(50 * PI, 51 * PI), 2.0, 7)
    y = sig.evaluate(np.arange(25) * 0.08)
    out = band_select(SampledSpectrum(y, 2.0), SpectralSelector(25 * PI, 5), sig.band, keep_dc=True)
    assert set(out.coeffs) == {-51, -50, 50, 51}
    assert abs(out.coeff(51) - sig.coeff(51)) <= 1e-10
    # harmonic 50 lands on the DC bin, which only carries its real part
    assert abs(out.coeff(50) - sig.coeff(50).real) <= 1e-10


def test_maximal_odd_rate_abuts_the_passband():
    band = BandSpec(2 * PI * 200, 2 * PI * 202)
    sig = synth_random_bandpass(band, 1.0, 2)
    T = PI * 2 / band.omega_low
    K = round(1.0 / T)
    sel = SpectralSelector(2 * PI / T, 3)
    assert sel.low == pytest.approx(band.omega_low)
    out = band_select(SampledSpectrum(sig.evaluate(np.arange(K) * T), 1.0), sel, band)
    for n in (201, 202):
        assert abs(out.coeff(n) - sig.coeff(n)) <= 1e-10
    base = relocate(sig, T)
    support = [n for n, c in base.coeffs.items() if abs(c) > 1e-12]
    assert max(abs(n) for n in support) * 2 * PI <= band.width + 1e-9


@settings(max_examples=20)
@given(st.integers(0, 2**31 - 1), st.sampled_from([ODD_CASE, EVEN_CASE]))
def test_band_select_round_trip_and_energy(seed, case):
    sig, band, P, K = bandpass_case(case, seed)
    y = sig.evaluate(np.arange(K) / K)
    out = band_select(SampledSpectrum(y, 1.0), SpectralSelector(2 * PI * K, P), band)
    for n in range(case[2], case[3] + 1):
        assert abs(out.coeff(n) - sig.coeff(n)) <= 1e-10
    assert out.energy() == pytest.approx(sig.energy(), rel=1e-10)


def test_lowpass_extract_examples():
    sig = FourierSeries(1.0, {1: 0.5, -1: 0.5, 7: 1j, -7: -1j})
    out = lowpass_extract(sig, 2 * PI * 10)
    assert set(out.coeffs) == {-1, 1}
    empty = lowpass_extract(FourierSeries(1.0, {9: 1, -9: 1}), 2 * PI * 4)
    assert not empty.coeffs


def test_carrier_aliasing_baseband_reproduces_samples():
    p = AmParams(-2.502, 2 * PI * 35, 1.147, 2 * PI * 400, -0.17)
    sig = synth_am(p, 0.2)
    T, K = 0.0025, 80
    y = sig.evaluate(np.arange(K) * T)
    base = lowpass_extract(SampledSpectrum(y, 0.2), 2 * PI / T)
    np.testing.assert_allclose(base.evaluate(np.arange(K) * T), y, atol=1e-12)
    # the carrier sits on a multiple of the sampling rate, leaving the envelope times sin(theta_c)
    t = np.linspace(0, 0.2, 333)
    g = p.amp * (1 + np.cos(p.omega_msg * t + p.phase_msg)) * math.sin(p.phase_carrier)
    np.testing.assert_allclose(base.evaluate(t), g, atol=1e-12)


def test_sinc_interpolation_examples():
    y = np.random.default_rng(0).normal(size=40)
    np.testing.assert_allclose(sinc_interpolate(y, PI, np.arange(40.0)), y, atol=1e-12)
    const = sinc_interpolate(np.ones(20001), PI, [10000.5])[0]
    assert const == pytest.approx(1.0, abs=1e-3)
    K, T = 32, 1 / 32
    tone = np.cos(2 * PI * 3 * np.arange(K) * T)
    t = np.linspace(0, 1, 97)
    err = np.max(np.abs(sinc_interpolate(tone, PI / T, t, periodic=True) - np.cos(2 * PI * 3 * t)))
    assert err <= 1e-6


def test_remodulation_examples():
    t = np.linspace(0, 1, 50)
    out = am_remodulate(lambda x: np.ones_like(x), 20.0, 0.3, t)
    np.testing.assert_allclose(out, np.sin(20 * t + 0.3) / math.sin(0.3))
    g = np.cos(3 * t)
    np.testing.assert_allclose(am_remodulate(g, 20.0, PI / 2, t), g * np.cos(20 * t), atol=1e-12)
    with pytest.raises(IllConditionedError):
        am_remodulate(g, 20.0, 1e-8, t)
