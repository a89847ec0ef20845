import math

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from modband import (
    BandSpec,
    GridMismatchError,
    InfeasiblePlanError,
    am_fourier_rate,
    am_time_rate,
    baseband_relocation,
    discrete_indices,
    fp_classic,
    lemma1_range,
    p_max,
    theorem1_range,
    theorem3_ranges,
    us_classic,
)
from modband.planner import baseband_bandwidth, enumerate_plans, min_samples_fp, wedge_for

PI, E = math.pi, math.e
BAND_50 = BandSpec(50 * PI, 51 * PI)
BAND_199 = BandSpec(199 * PI, 200 * PI)
EXP1_BAND = BandSpec(628.31 - 43.98, 628.31 + 43.98)


def test_us_classic_period_and_order():
    t_us, _ = us_classic(51 * PI, 1.0, 1.0)
    assert t_us == pytest.approx(1 / (102 * PI * E), rel=1e-15)
    assert t_us == pytest.approx(1.1e-3, abs=5e-5)
    assert us_classic(PI, 0.5, 0.5)[1] == 0
    # ln(0.07/1.12) / ln(0.08 pi e) = 7.28
    assert us_classic(PI, 0.07, 1.12, 0.08)[1] == 8
    with pytest.raises(ValueError):
        us_classic(PI, 1.0, 0.5)


def test_fp_classic_examples():
    assert fp_classic(1.0, 2 * PI, 0).t_max == pytest.approx(0.25)
    assert min_samples_fp(1.0, 2 * PI, 1) == min_samples_fp(1.0, 2 * PI, 0) + 2
    assert min_samples_fp(2.0, 200 * PI, 259) == 920
    with pytest.raises(ValueError):
        fp_classic(1.0, PI, -1)


def test_lemma1_examples():
    plan = lemma1_range(BAND_50, 5)
    assert plan.t_min == pytest.approx(0.08)
    assert plan.t_max == pytest.approx(5 / 51)
    assert plan.feasible and plan.parity == "odd"
    low = lemma1_range(BAND_50, 1)
    assert low.t_min == 0.0 and low.t_max == pytest.approx(PI / (51 * PI))


def test_theorem1_examples():
    assert theorem1_range(BAND_50, 1).t_max == pytest.approx(1 / (102 * PI * E))
    two = theorem1_range(BAND_50, 2)
    assert two.t_min == pytest.approx(0.04 - 1 / (100 * PI * E))
    assert two.t_max == pytest.approx(2 / 51)
    assert two.parity == "even" and two.feasible
    five = theorem1_range(BAND_50, 5)
    assert not five.feasible and five.empty
    assert five.t_min == pytest.approx(0.08)
    assert five.t_max == pytest.approx(8 / 102 + 1 / (102 * PI * E))
    assert "empty" in five.reason
    with pytest.raises(InfeasiblePlanError):
        five.require()


def test_p_max_examples():
    b = p_max(BAND_50)
    assert (b.odd, b.even, b.overall) == (3, 2, 2)
    assert p_max(EXP1_BAND).even == 0
    assert p_max(BandSpec(1.0, 100.0)).overall == 0


def test_baseband_relocation_examples():
    omega_s, base = baseband_relocation(BAND_50, 5)
    assert omega_s == pytest.approx(25 * PI)
    assert 2 * PI / omega_s == pytest.approx(0.080, abs=1e-15)
    assert base == pytest.approx(PI)
    omega_s, _ = baseband_relocation(BAND_199, 2)
    assert 2 * PI / omega_s == pytest.approx(0.010)
    with pytest.raises(InfeasiblePlanError):
        baseband_relocation(BAND_50, 1)


def test_am_time_rate_examples():
    plan = am_time_rate(EXP1_BAND, 1)
    assert plan.omega_s == pytest.approx(628.31)
    assert not plan.feasible and plan.reason
    assert am_time_rate(BandSpec(40 * PI, 40 * PI), 1).feasible
    assert am_time_rate(EXP1_BAND, 2).omega_s == pytest.approx(plan.omega_s / 2)


def test_theorem3_lowpass_reduces_to_fourier_prony():
    outer, inner = theorem3_ranges(1.0, 10, 10, 3, 1)
    assert outer.t_min == 0.0
    assert outer.t_max == pytest.approx(fp_classic(1.0, 20 * PI, 3).t_max)
    assert inner.feasible
    _, inner = theorem3_ranges(1.0, 3, 10, 3, 1)
    assert not inner.feasible


def test_theorem3_even_wedge_example():
    outer, inner = theorem3_ranges(2.0, 199, 200, 40, 2)
    assert (outer.t_min, outer.t_max) == pytest.approx((1 / 158, 0.01))
    assert (inner.t_min, inner.t_max) == pytest.approx((1 / 199, 4 / 482))
    assert outer.contains(0.01)
    blocked, _ = theorem3_ranges(2.0, 199, 200, 198, 2)
    assert not blocked.feasible and "Q_L" in blocked.reason


def test_am_fourier_rate_examples():
    plan = am_fourier_rate(0.299, EXP1_BAND, 4, 1)
    assert plan.feasible
    assert plan.omega_s == pytest.approx(200 * PI, rel=1e-4)
    assert EXP1_BAND.width == pytest.approx(28 * PI, rel=1e-3)
    assert not am_fourier_rate(0.299, EXP1_BAND, 26, 1).feasible


def test_discrete_indices_examples():
    exp1 = EXP1_BAND.snapped(0.299)
    assert discrete_indices(0.299, 30, exp1, 2).q_high_base == 3
    idx = discrete_indices(2.0, 200, BAND_199, 2)
    assert (idx.q_low, idx.q_high, idx.q_high_base, idx.q_low_base) == (199, 200, 1, 0)
    low = discrete_indices(1.0, 64, BandSpec(6 * PI, 10 * PI), 1)
    assert low.q_high_base == low.q_high == 5
    with pytest.raises(GridMismatchError):
        discrete_indices(2.0, 200, BandSpec(50.5 * PI, 51 * PI), 2)


def test_admissible_periods_and_wedge_lookup():
    Ts = lemma1_range(BAND_50, 5).admissible_periods(2.0)
    assert [round(2.0 / t) for t in Ts] == [21, 22, 23, 24, 25]
    assert wedge_for(BAND_50, 0.08) == 5
    assert all(p.wedge == i + 1 for i, p in enumerate(enumerate_plans(BAND_50)))


bands = st.tuples(st.floats(1.0, 500.0), st.floats(0.01, 20.0)).map(lambda x: BandSpec(x[0], x[0] + x[1]))


@given(bands, st.integers(1, 40))
def test_theorem1_inside_lemma1(band, P):
    t1, l1 = theorem1_range(band, P), lemma1_range(band, P)
    assume(t1.feasible)
    assert l1.t_min <= t1.t_min * (1 + 1e-12)
    assert t1.t_max <= l1.t_max * (1 + 1e-12)


@given(bands, st.integers(1, 40))
def test_theorem1_midpoint_meets_baseband_bound(band, P):
    plan = theorem1_range(band, P)
    assume(plan.feasible and plan.t_max > 0)
    T = plan.midpoint
    w = baseband_bandwidth(band, P, 2 * PI / T)
    assert T * w * E <= 0.5 * (1 + 1e-9)


@given(bands, st.integers(2, 40))
def test_relocation_rate_is_a_bandpass_rate(band, P):
    assume(lemma1_range(band, P).feasible)
    omega_s, base = baseband_relocation(band, P)
    assert lemma1_range(band, P).contains(2 * PI / omega_s, rtol=1e-9)
    assert base == pytest.approx(band.width, rel=1e-9, abs=1e-9)


@given(st.integers(1, 200), st.integers(0, 5), st.integers(1, 12))
def test_discrete_low_index_nonnegative_at_bandpass_rates(n_lo, width, P):
    tau = 1.0
    band = BandSpec(2 * PI * n_lo, 2 * PI * (n_lo + width))
    for T in lemma1_range(band, P).admissible_periods(tau):
        K = round(tau / T)
        if (P - 1) * K % 2 or (P * K) % 2 and P % 2 == 0:
            continue
        assert discrete_indices(tau, K, band, P).q_low_base >= 0
