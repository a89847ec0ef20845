import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from modband import (
    BandSpec,
    FourierSeries,
    HysteresisParams,
    NonIdealResidue,
    PartitionError,
    ResolutionError,
    UnavailableError,
    capture_generalized,
    capture_ideal,
    fold_generalized,
    fold_ideal,
    fold_nonideal,
    jittered_residue,
    relocate,
    residue_and_fold_count,
    synth_random_bandpass,
)
from modband.folding import FoldedCapture, circular_diff, round_to_grid

finite = st.floats(-1e6, 1e6, allow_nan=False)
lams = st.floats(1e-3, 1e3)


def test_fold_examples():
    assert fold_ideal(0.3, 1.0) == pytest.approx(0.3)
    assert fold_ideal(1.0, 1.0) == pytest.approx(-1.0)
    assert fold_ideal(-1.0, 1.0) == pytest.approx(-1.0)
    assert fold_ideal(2.5, 1.0) == pytest.approx(0.5)
    assert fold_ideal(-3.2, 1.0) == pytest.approx(0.8)
    with pytest.raises(ValueError):
        fold_ideal(1.0, 0.0)


@given(finite, lams)
def test_fold_range_and_grid(x, lam):
    y = fold_ideal(x, lam)
    assert -lam <= y < lam
    q = (x - y) / (2 * lam)
    assert abs(q - round(q)) <= 1e-9 * max(1.0, abs(q))


@given(finite, lams)
def test_fold_idempotent(x, lam):
    y = fold_ideal(x, lam)
    assert fold_ideal(y, lam) == pytest.approx(y, abs=1e-12 * lam)


@given(st.floats(-100, 100), st.floats(0.01, 10))
def test_round_to_grid_is_nearest_multiple(x, lam):
    r = float(round_to_grid(x, lam))
    assert abs(r / (2 * lam) - round(r / (2 * lam))) < 1e-9
    assert abs(x - r) <= lam * (1 + 1e-9)


def _sine():
    return FourierSeries(1.0, {1: 0.5j * -1, -1: 0.5j})  # sin(2 pi t)


def test_generalized_without_events_below_threshold():
    fold = fold_generalized(_sine().scaled(0.4), HysteresisParams(0.5, 0.2), 1.0)
    assert fold.events == []


def test_generalized_sine_events():
    sig = _sine()
    assert sig.evaluate([0.25])[0] == pytest.approx(1.0)
    fold = fold_generalized(sig, HysteresisParams(0.5, 0.2), 0.6)
    (t1, s1), (t2, s2) = fold.events[:2]
    assert (s1, s2) == (1, -1)
    assert t1 == pytest.approx(1 / 12, abs=1e-9)
    assert t2 == pytest.approx(0.5 - math.asin(0.3) / (2 * math.pi), abs=1e-9)
    assert t2 == pytest.approx(0.45153, abs=1e-4)
    eps = 1e-7
    jump1 = fold.trace([t1 - eps])[0] - fold.trace([t1 + eps])[0]
    assert abs(jump1) == pytest.approx(0.8, abs=1e-5)


def test_generalized_transient_ramps_half_way():
    sig = _sine()
    fold = fold_generalized(sig, HysteresisParams(0.5, 0.2, 0.01), 0.3)
    t1 = fold.events[0][0]
    assert fold.residual([t1 + 0.005])[0] == pytest.approx(0.4, abs=1e-9)
    assert fold.residual([t1 + 0.02])[0] == pytest.approx(0.8, abs=1e-12)


def test_generalized_with_zero_hysteresis_matches_ideal_grid():
    sig = synth_random_bandpass(BandSpec(2 * math.pi, 6 * math.pi), 1.0, 4)
    cap = capture_generalized(sig, HysteresisParams(0.3), 1 / 200, 200)
    ref = capture_ideal(sig, 0.3, 1 / 200, 200)
    d = (cap.samples - ref.samples) / 0.6
    assert np.max(np.abs(d - np.round(d))) < 1e-9


def test_generalized_resolution_error():
    fast = FourierSeries(1.0, {1: -5j, -1: 5j})
    with pytest.raises(ResolutionError):
        fold_generalized(fast, HysteresisParams(0.05), 1.0, grid=0.05)


def test_nonideal_examples():
    gamma = np.linspace(-1, 1, 8)
    cap = fold_nonideal(gamma, NonIdealResidue())
    np.testing.assert_array_equal(cap.samples, gamma)
    cap = fold_nonideal(gamma, NonIdealResidue((3,), (0.0, 1.7)))
    r, m = residue_and_fold_count(cap)
    np.testing.assert_allclose(r, [0, 0, 0, 1.7, 1.7, 1.7, 1.7, 1.7])
    assert m == 1
    np.testing.assert_allclose(cap.samples + r, gamma)


def test_nonideal_partition_errors():
    with pytest.raises(PartitionError):
        NonIdealResidue((4, 2), (1.0, 2.0))
    with pytest.raises(PartitionError):
        NonIdealResidue((1,), (1.0, 2.0, 3.0))
    with pytest.raises(PartitionError):
        NonIdealResidue((9,), (1.0,)).values(5)


def test_jittered_residue_keeps_fold_instants():
    gamma = 3 * np.sin(np.linspace(0, 2 * np.pi, 64, endpoint=False))
    ideal = gamma - fold_ideal(gamma, 1.0)
    res = jittered_residue(gamma, 1.0, 0.1, seed=1)
    jumps = np.nonzero(np.diff(ideal))[0] + 1
    assert res.breakpoints == tuple(jumps)
    levels = np.array(res.values(64))
    assert not np.allclose(levels, ideal)


def test_fold_count_examples():
    sig = synth_random_bandpass(BandSpec(2 * math.pi, 4 * math.pi), 1.0, 0).scaled(0.5)
    cap = capture_ideal(sig, 1.0, 1 / 64, 64)
    r, m = residue_and_fold_count(cap)
    assert m == 0 and not np.any(r)
    cap.ground_truth = None
    with pytest.raises(UnavailableError):
        residue_and_fold_count(cap)


def test_ideal_capture_rejects_out_of_range_samples():
    with pytest.raises(ValueError):
        FoldedCapture(np.array([0.0, 1.5]), 0.1, "ideal", lam=1.0)


def test_circular_diff_wraps():
    np.testing.assert_array_equal(circular_diff([1.0, 3.0, 6.0]), [2.0, 3.0, -5.0])


@given(st.integers(0, 2**31 - 1), st.floats(0.02, 0.5), st.sampled_from([(3, 198, 200, 202), (2, 103, 100, 102)]))
def test_folded_bandpass_equals_folded_relocation(seed, lam, case):
    # under a valid bandpass rate the sampled passband and its baseband relocation coincide
    _, K, n_lo, n_hi = case
    sig = synth_random_bandpass(BandSpec(2 * math.pi * n_lo, 2 * math.pi * n_hi), 1.0, seed)
    T = 1.0 / K
    t = np.arange(K) * T
    base = relocate(sig, T)
    a = fold_ideal(sig.evaluate(t), lam)
    b = fold_ideal(base.evaluate(t), lam)
    d = np.abs(a - b)
    # a sample landing on the fold edge may wrap to the other end
    d = np.minimum(d, np.abs(d - 2 * lam))
    assert np.max(d) <= 1e-9
