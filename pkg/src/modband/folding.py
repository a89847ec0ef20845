"""Folding (modulo ADC) simulators: ideal, hysteresis/transient, and non-ideal."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from scipy.optimize import brentq

from .exceptions import PartitionError, ResolutionError, UnavailableError
from .signal_model import make_rng

FOLD_COUNT_TOL = 1e-9
ARCHITECTURES = ("ideal", "generalized", "nonideal")


def fold_ideal(x, lam):
    """Centered modulo into ``[-lam, lam)``; ``x - fold_ideal(x, lam)`` is a multiple of ``2 lam``."""
    lam = np.asarray(lam, dtype=float)
    if not np.all(lam > 0):
        raise ValueError("lam must be positive")
    x = np.asarray(x, dtype=float)
    two = 2.0 * lam
    y = x - two * np.floor(x / two + 0.5)
    # floor() on a rounded quotient can land one step off near the edges
    y = np.where(y >= lam, y - two, y)
    y = np.where(y < -lam, y + two, y)
    return y if np.ndim(y) else float(y)


def round_to_grid(x, lam):
    """``2 lam * ceil(floor(x / lam) / 2)``: nearest multiple of ``2 lam``."""
    return 2.0 * lam * np.ceil(np.floor(np.asarray(x, dtype=float) / lam) / 2.0)


@dataclass(frozen=True)
class IdealModuloParams:
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lam must be positive")

    def to_dict(self):
        return {"lam": self.lam}


@dataclass(frozen=True)
class HysteresisParams:
    """Generalized modulo ``[lam, h, alpha]``; the reset height is ``2 lam_h``."""

    lam: float
    hysteresis: float = 0.0
    transient: float = 0.0

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        if not 0 <= self.hysteresis < 2 * self.lam:
            raise ValueError("hysteresis must lie in [0, 2*lam)")
        if self.transient < 0:
            raise ValueError("transient must be >= 0")

    @property
    def lambda_h(self):
        return self.lam - self.hysteresis / 2

    def to_dict(self):
        return {"lam": self.lam, "hysteresis": self.hysteresis, "transient": self.transient}


@dataclass(frozen=True)
class NonIdealResidue:
    """Piecewise-constant residue on the sample grid.

    ``levels`` has one entry per cell. With ``len(levels) == len(breakpoints)`` the
    cell before the first breakpoint has level 0; with one extra level it is explicit.
    """

    breakpoints: tuple = ()
    levels: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", tuple(int(b) for b in self.breakpoints))
        object.__setattr__(self, "levels", tuple(float(c) for c in self.levels))
        b = self.breakpoints
        if any(b2 <= b1 for b1, b2 in zip(b, b[1:])):
            raise PartitionError("breakpoints must be strictly increasing")
        if len(self.levels) not in (len(b), len(b) + 1):
            raise PartitionError("need one level per cell")

    @property
    def cell_levels(self):
        if len(self.levels) == len(self.breakpoints):
            return (0.0,) + self.levels
        return self.levels

    def values(self, K):
        if self.breakpoints and not (0 <= self.breakpoints[0] and self.breakpoints[-1] < K):
            raise PartitionError(f"breakpoints must lie in [0, {K})")
        r = np.empty(K)
        edges = (0,) + self.breakpoints + (K,)
        for lo, hi, c in zip(edges, edges[1:], self.cell_levels):
            r[lo:hi] = c
        return r

    @property
    def fold_count(self):
        return len(self.breakpoints)

    def to_dict(self):
        return {"breakpoints": list(self.breakpoints), "levels": list(self.levels)}


@dataclass
class FoldedCapture:
    """One period of folded samples ``y[k]`` taken every ``sample_period`` seconds."""

    samples: np.ndarray
    sample_period: float
    architecture: str = "ideal"
    params: Any = None
    ground_truth: np.ndarray | None = None
    lam: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.ground_truth is not None:
            self.ground_truth = np.asarray(self.ground_truth, dtype=float)
            if self.ground_truth.shape != self.samples.shape:
                raise ValueError("ground_truth must match samples")
        if self.architecture not in ARCHITECTURES:
            raise ValueError(f"unknown architecture {self.architecture!r}")
        if self.lam is None and self.params is not None and hasattr(self.params, "lam"):
            self.lam = self.params.lam
        if self.architecture == "ideal" and self.lam is not None:
            lam = self.lam
            if np.any(self.samples < -lam) or np.any(self.samples >= lam * (1 + 1e-12)):
                raise ValueError("ideal capture samples must lie in [-lam, lam)")

    @property
    def K(self):
        return self.samples.size

    @property
    def times(self):
        return np.arange(self.K) * self.sample_period

    @property
    def period(self):
        return self.K * self.sample_period

    def params_dict(self):
        out = {"architecture": self.architecture, "sample_period": self.sample_period}
        if self.params is not None:
            out["params"] = self.params.to_dict()
        if self.lam is not None:
            out["lam"] = self.lam
        out.update(self.meta)
        return out


def capture_ideal(sig, lam, sample_period, count):
    """Sample ``sig`` and fold each sample with the ideal modulo."""
    gamma = sig.evaluate(np.arange(count) * sample_period)
    return FoldedCapture(
        fold_ideal(gamma, lam), sample_period, "ideal", IdealModuloParams(lam), gamma
    )


@dataclass
class GeneralizedFold:
    """Continuous-time output of the hysteresis/transient modulo for one input."""

    signal: Any
    params: HysteresisParams
    event_times: np.ndarray
    event_signs: np.ndarray
    horizon: float

    def residual(self, times):
        t = np.asarray(times, dtype=float)
        lam_h = self.params.lambda_h
        alpha = self.params.transient
        out = np.zeros_like(t)
        for tp, sp in zip(self.event_times, self.event_signs):
            d = t - tp
            if alpha > 0:
                step = np.clip(d / alpha, 0.0, 1.0)
            else:
                step = (d >= 0).astype(float)
            out += sp * 2 * lam_h * step
        return out

    def trace(self, times):
        t = np.asarray(times, dtype=float)
        return self.signal.evaluate(t) - self.residual(t)

    @property
    def events(self):
        return list(zip(self.event_times.tolist(), self.event_signs.astype(int).tolist()))

    def capture(self, sample_period, count):
        t = np.arange(count) * sample_period
        if t[-1] > self.horizon:
            raise ValueError("sampling window exceeds the simulated horizon")
        gamma = self.signal.evaluate(t)
        y = gamma - self.residual(t)
        return FoldedCapture(
            y, sample_period, "generalized", self.params, gamma, lam=self.params.lam
        )


def default_event_grid(g):
    band = getattr(g, "band", None)
    if band is not None:
        omega = band.omega_high
    elif getattr(g, "coeffs", None):
        omega = g.n_max * 2 * np.pi / g.period
    else:
        raise ValueError("cannot infer a detection grid; pass grid=")
    return 1.0 / (64 * omega / (2 * np.pi))


def fold_generalized(g, H: HysteresisParams, horizon, grid=None) -> GeneralizedFold:
    """Simulate the hysteresis modulo on ``[0, horizon]``.

    Events are located by scanning a uniform grid for the first exit from the
    current pair of threshold levels, then refining the crossing with Brent's method.
    """
    lam, h = H.lam, H.hysteresis
    if grid is None:
        grid = default_event_grid(g)
    n = int(np.ceil(horizon / grid)) + 1
    tg = np.linspace(0.0, horizon, n)
    step = tg[1] - tg[0]
    G = np.asarray(g.evaluate(tg), dtype=float)

    g0 = G[0]
    m = np.floor((g0 - lam) / (2 * lam))
    lower, upper = lam + 2 * lam * m, lam + 2 * lam * (m + 1)
    if g0 == lower:
        raise ResolutionError("input starts exactly on a threshold")

    times, signs = [], []
    t_prev, i0 = 0.0, 1
    while i0 < n:
        seg = G[i0:]
        hit = np.nonzero((seg < lower) | (seg > upper))[0]
        if hit.size == 0:
            break
        i = i0 + int(hit[0])
        up = G[i] > upper
        level = upper if up else lower
        a = max(tg[i - 1], t_prev)
        b = tg[i]
        fa = float(g.evaluate(np.array([a]))[0]) - level
        if fa == 0.0:
            tp = a
        elif np.sign(fa) == np.sign(G[i] - level):
            raise ResolutionError(f"cannot bracket the crossing of level {level:.6g} near t={b:.6g}")
        else:
            tp = brentq(lambda t: float(g.evaluate(np.array([t]))[0]) - level, a, b,
                        xtol=step * 1e-9, rtol=4 * np.finfo(float).eps)
        if times and tp - t_prev < step:
            raise ResolutionError(
                f"two folding events within one grid step near t={tp:.6g}; refine the grid"
            )
        s = 1 if up else -1
        times.append(tp)
        signs.append(s)
        if s > 0:
            lower, upper = level - h, level - h + 2 * lam
        else:
            lower, upper = level + h - 2 * lam, level + h
        t_prev = tp
        i0 = i if tg[i] > tp else i + 1
    return GeneralizedFold(g, H, np.array(times, dtype=float), np.array(signs, dtype=float), horizon)


def capture_generalized(sig, H, sample_period, count, grid=None):
    horizon = (count - 1) * sample_period
    fold = fold_generalized(sig, H, horizon, grid)
    cap = fold.capture(sample_period, count)
    cap.meta["events"] = len(fold.event_times)
    return cap


def fold_nonideal(gamma, residue: NonIdealResidue, sample_period=1.0, lam=None) -> FoldedCapture:
    """``y = gamma - R`` with ``R`` the piecewise-constant residue."""
    gamma = np.asarray(gamma, dtype=float)
    r = residue.values(gamma.size)
    return FoldedCapture(gamma - r, sample_period, "nonideal", residue, gamma, lam=lam)


def jittered_residue(gamma, lam, jitter=0.1, seed=0) -> NonIdealResidue:
    """Residue whose jumps sit at the ideal fold instants of ``gamma``, each scaled by ``1 + U(-jitter, jitter)``."""
    gamma = np.asarray(gamma, dtype=float)
    r = gamma - fold_ideal(gamma, lam)
    jumps = np.diff(r)
    idx = np.nonzero(np.abs(jumps) > FOLD_COUNT_TOL * lam)[0]
    rng = make_rng(seed)
    delta = rng.uniform(-jitter, jitter, size=idx.size)
    levels = r[0] + np.cumsum(jumps[idx] * (1 + delta))
    return NonIdealResidue(tuple(idx + 1), (r[0],) + tuple(levels))


def residue_and_fold_count(capture: FoldedCapture, circular=False):
    """Residue ``r = gamma - y`` and the number of level changes.

    With ``circular=True`` the wrap-around step from the last to the first sample
    also counts, which is the spike count seen by the periodic first difference.
    """
    if capture.ground_truth is None:
        raise UnavailableError("capture has no ground truth")
    r = capture.ground_truth - capture.samples
    lam = capture.lam if capture.lam else max(1.0, float(np.max(np.abs(r), initial=0.0)))
    d = np.roll(r, -1) - r if circular else np.diff(r)
    return r, int(np.count_nonzero(np.abs(d) > FOLD_COUNT_TOL * lam))


def circular_diff(x: Sequence[float]):
    x = np.asarray(x, dtype=float)
    return np.roll(x, -1) - x
