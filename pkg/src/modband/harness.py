"""Config-driven acquisition and reconstruction pipelines, sweeps and presets."""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .demodulation import am_remodulate, sinc_interpolate
from .exceptions import InfeasiblePlanError, ModbandError
from .folding import (
    FoldedCapture,
    HysteresisParams,
    capture_generalized,
    capture_ideal,
    fold_ideal,
    fold_nonideal,
    jittered_residue,
    residue_and_fold_count,
)
from .metrics import fix_offset, mse
from .planner import (
    SamplingPlan,
    am_fourier_rate,
    am_time_rate,
    discrete_indices,
    lemma1_range,
    theorem1_range,
    theorem3_ranges,
)
from .recovery_fourier import recover_bandpass_fourier
from .recovery_time import UsAlgConfig, beta_bound, grid_distance, recover_bandpass_time, recover_generalized
from .signal_model import AmParams, BandSpec, make_rng, sup_norm, synth_am, synth_random_bandpass

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

PRESETS = ("fig2", "fig6", "sec4a", "sec4b", "exp1", "exp2")
ROUNDTRIP_TOL = 1e-9
DENSE_POINTS = 4096
FOLD_SHRINK = 0.95


def thread_count(requested=None):
    """Worker count, capped by ``MODBAND_THREADS`` when set."""
    n = requested or os.cpu_count() or 1
    cap = os.environ.get("MODBAND_THREADS")
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


@dataclass
class ExperimentConfig:
    name: str = "experiment"
    signal: dict = field(default_factory=dict)
    architecture: dict = field(default_factory=lambda: {"kind": "ideal", "lam": 1.0})
    sampling: dict = field(default_factory=dict)
    recovery: dict = field(default_factory=lambda: {"method": "time"})
    seed: int = 0
    replications: int = 1

    @classmethod
    def from_dict(cls, d):
        known = {k: d[k] for k in ("name", "signal", "architecture", "sampling", "recovery", "seed", "replications") if k in d}
        return cls(**known)

    @classmethod
    def from_file(cls, path):
        path = Path(path)
        text = path.read_text()
        data = json.loads(text) if path.suffix == ".json" else tomllib.loads(text)
        return cls.from_dict(data)

    def to_dict(self):
        return asdict(self)

    # derived quantities

    @property
    def period(self):
        return float(self.sampling["period"])

    @property
    def K(self):
        s = self.sampling
        if "samples" in s:
            return int(s["samples"])
        x = self.period / float(s["sample_period"])
        K = round(x)
        if abs(x - K) > 1e-9 * x:
            raise ValueError("period / sample_period must be an integer")
        return K

    @property
    def sample_period(self):
        return self.period / self.K

    @property
    def is_am(self):
        return self.signal.get("kind") == "am"

    def am_params(self, snap=True):
        s = self.signal
        om = s["omega_msg"] if "omega_msg" in s else 2 * math.pi * s["freq_msg_hz"]
        oc = s["omega_carrier"] if "omega_carrier" in s else 2 * math.pi * s["freq_carrier_hz"]
        p = AmParams(s["amp"], om, s.get("phase_msg", 0.0), oc, s.get("phase_carrier", 0.0))
        return p.snapped(self.period) if snap else p

    @property
    def raw_band(self):
        """Band as configured, before snapping to the harmonic grid."""
        if self.is_am:
            return self.am_params(snap=False).band
        return self.band

    @property
    def band(self):
        s = self.signal
        if self.is_am:
            # outward snap of the nominal band: it contains the snapped tones
            return self.am_params(snap=False).band.snapped(self.period)
        if "band_pi" in s:
            lo, hi = s["band_pi"]
            return BandSpec(lo * math.pi, hi * math.pi)
        return BandSpec(*s["band"])

    @property
    def wedge(self):
        return int(self.recovery.get("wedge", 1))


def load_preset(name, fmt="toml") -> ExperimentConfig:
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    base = resources.files("modband") / "presets"
    if fmt == "json":
        return ExperimentConfig.from_dict(json.loads((base / "presets.json").read_text())[name])
    return ExperimentConfig.from_dict(tomllib.loads((base / f"{name}.toml").read_text()))


def plan_for(cfg: ExperimentConfig) -> SamplingPlan:
    """Sampling plan named by ``recovery.regime`` for this configuration."""
    band = cfg.band
    P = cfg.wedge
    regime = cfg.recovery.get("regime")
    folds = int(cfg.recovery.get("folds", 0))
    if regime is None:
        regime = "unlimited-time" if cfg.recovery.get("method", "time") == "time" else "fourier-outer"
    if regime == "nyquist-lemma":
        return lemma1_range(band, P)
    if regime == "unlimited-time":
        return theorem1_range(band, P)
    if regime == "am-time":
        return am_time_rate(cfg.raw_band, max(1, P // 2))
    if regime == "am-fourier":
        return am_fourier_rate(cfg.period, cfg.raw_band, folds, max(1, P // 2))
    if regime in ("fourier-outer", "fourier-inner"):
        idx = discrete_indices(cfg.period, cfg.K, band, P)
        outer, inner = theorem3_ranges(cfg.period, idx.q_low, idx.q_high, folds, P)
        return outer if regime == "fourier-outer" else inner
    raise ValueError(f"unsupported regime {regime!r}")


def check_plan(cfg: ExperimentConfig):
    """Return ``(plan, ok)``; raise when the sampling period is outside the plan and
    the configuration does not ask for empirical validation."""
    plan = plan_for(cfg)
    T = cfg.sample_period
    if plan.regime in ("am-time", "am-fourier"):
        ok = bool(plan.feasible)
    else:
        ok = bool(plan.feasible) and plan.contains(T)
    if not ok and not cfg.recovery.get("empirical", False):
        reason = plan.reason or f"T_S={T:.6g} outside [{plan.t_min:.6g}, {plan.t_max:.6g}]"
        raise InfeasiblePlanError(reason, plan)
    return plan, ok


@dataclass
class SweepReport:
    name: str
    plan: dict
    plan_satisfied: bool
    runs: list = field(default_factory=list)

    @property
    def mses(self):
        return [r["mse"] for r in self.runs if r["mse"] is not None]

    @property
    def aggregates(self):
        n = len(self.runs)
        m = self.mses
        return {
            "runs": n,
            "max_mse": max(m) if m else None,
            "mean_mse": float(np.mean(m)) if m else None,
            "failure_rate": (sum(not r["success"] for r in self.runs) / n) if n else 0.0,
            "max_folds": max((r["folds"] for r in self.runs if r["folds"] is not None), default=None),
            "max_folds_circular": max(
                (r["folds_circular"] for r in self.runs if r["folds_circular"] is not None), default=None
            ),
        }

    @property
    def all_succeeded(self):
        return all(r["success"] for r in self.runs)

    def to_dict(self):
        return {"name": self.name, "plan": self.plan, "plan_satisfied": self.plan_satisfied,
                "aggregates": self.aggregates, "runs": self.runs}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=_json_default)


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o).__name__)


def _draw_lam(arch, rng):
    if "lam_range" in arch:
        lo, hi = arch["lam_range"]
        return float(rng.uniform(lo, hi))
    return float(arch["lam"])


def build_signal(cfg: ExperimentConfig, idx):
    if cfg.is_am:
        return synth_am(cfg.am_params(), cfg.period)
    seed = cfg.signal.get("signal_seed", (cfg.seed, idx, 0))
    sig = synth_random_bandpass(cfg.band, cfg.period, seed)
    return sig.scaled(float(cfg.signal.get("amplitude", 1.0)))


def acquire(cfg: ExperimentConfig, sig, lam, idx):
    """Fold and sample one period of ``sig`` under the configured architecture."""
    arch = cfg.architecture
    kind = arch.get("kind", "ideal")
    T, K = cfg.sample_period, cfg.K
    if kind == "ideal":
        return capture_ideal(sig, lam, T, K)
    if kind == "generalized":
        H = HysteresisParams(lam, arch.get("hysteresis", 0.0), arch.get("transient", 0.0))
        return capture_generalized(sig, H, T, K)
    if kind == "nonideal":
        gamma = sig.evaluate(np.arange(K) * T)
        res = jittered_residue(gamma, lam, arch.get("jitter", 0.1), seed=(cfg.seed, idx, 2))
        return fold_nonideal(gamma, res, T, lam)
    raise ValueError(f"unknown architecture {kind!r}")


def recover(cfg: ExperimentConfig, capture: FoldedCapture, amp):
    """Run the configured recovery; ``amp`` bounds the input amplitude."""
    rec = cfg.recovery
    method = rec.get("method", "time")
    band, P = cfg.band, cfg.wedge
    if method == "fourier":
        folds = int(rec.get("folds", 0))
        return recover_bandpass_fourier(
            capture, cfg.period, band, folds, P, rec.get("set", "auto"),
            snap_2lambda=bool(rec.get("snap_2lambda", False)),
        )[0]
    if method != "time":
        raise ValueError(f"unknown method {method!r}")
    if capture.architecture == "generalized":
        H = capture.params
        return recover_generalized(capture, H, beta_bound(amp, H.lambda_h), band, P, rec.get("order"))
    lam = capture.lam
    ucfg = UsAlgConfig(lam, beta_bound(amp, lam), rec.get("order"), band, capture.sample_period, P,
                       int(rec.get("max_order", 8)))
    return recover_bandpass_time(capture, ucfg)[0]


def reconstruct(cfg: ExperimentConfig, report, times):
    """Continuous-time estimate of the input from an offset-fixed recovery."""
    T = cfg.sample_period
    if cfg.is_am:
        p = cfg.am_params()
        base = sinc_interpolate(report.aligned, math.pi / T, times, periodic=True)
        return am_remodulate(base, p.omega_carrier, p.phase_carrier, times)
    if report.signal is not None:
        return report.signal.evaluate(times)
    return sinc_interpolate(report.aligned, math.pi / T, times, periodic=True)


def run_once(cfg: ExperimentConfig, idx, *, keep=False):
    if cfg.signal.get("kind") == "capture-file":
        return _run_capture_file(cfg, idx, keep)
    rng = make_rng((cfg.seed, idx, 1))
    lam = _draw_lam(cfg.architecture, rng)
    sig = build_signal(cfg, idx)
    cap = acquire(cfg, sig, lam, idx)
    cap_limit = cfg.recovery.get("fold_cap")
    shrink = 0
    while cap_limit is not None and residue_and_fold_count(cap, circular=True)[1] > cap_limit:
        sig = sig.scaled(FOLD_SHRINK)
        cap = acquire(cfg, sig, lam, idx)
        shrink += 1
    _, folds = residue_and_fold_count(cap)
    _, folds_c = residue_and_fold_count(cap, circular=True)
    try:
        report = recover(cfg, cap, sup_norm(sig))
    except ModbandError as exc:
        run = {"index": idx, "lam": lam, "folds": folds, "folds_circular": folds_c, "success": False,
               "mse": None, "order_used": None, "offset_multiple": None, "error": str(exc)}
        return (run, None) if keep else run
    grid = cap.params.lambda_h if cap.architecture == "generalized" else lam
    roundtrip = grid_distance(report.recovered - cap.samples, grid) if cap.architecture != "nonideal" else None
    ok = report.success and (roundtrip is None or roundtrip <= ROUNDTRIP_TOL)
    run = {
        "index": idx,
        "lam": lam,
        "rho": sup_norm(sig) / lam,
        "folds": folds,
        "folds_circular": folds_c,
        "amplitude_shrinks": shrink,
        "success": bool(ok),
        "mse": report.mse,
        "order_used": report.order_used,
        "offset_multiple": report.offset_multiple,
        "roundtrip": roundtrip,
    }
    t = np.arange(DENSE_POINTS) * (cfg.period / DENSE_POINTS)
    if cfg.is_am or report.signal is not None:
        run["signal_mse"] = mse(reconstruct(cfg, report, t), sig.evaluate(t))
    if keep:
        return run, {"signal": sig, "capture": cap, "report": report}
    return run


def _run_capture_file(cfg, idx, keep):
    from .serialization import ingest_capture

    cap = ingest_capture(cfg.signal["path"])
    if cap.lam is None:
        cap.lam = float(cfg.architecture["lam"])
    amp = cfg.signal.get("amplitude_bound")
    if amp is None:
        src = cap.ground_truth if cap.ground_truth is not None else cap.samples
        amp = float(np.max(np.abs(src)))
    report = recover(cfg, cap, amp)
    folds = folds_c = None
    if cap.ground_truth is not None:
        folds = residue_and_fold_count(cap)[1]
        folds_c = residue_and_fold_count(cap, circular=True)[1]
    run = {"index": idx, "lam": cap.lam, "folds": folds, "folds_circular": folds_c,
           "success": bool(report.success), "mse": report.mse, "order_used": report.order_used,
           "offset_multiple": report.offset_multiple}
    return (run, {"signal": None, "capture": cap, "report": report}) if keep else run


def run_experiment(cfg: ExperimentConfig, workers=None) -> SweepReport:
    """Synthesize, fold, recover and score every replication.

    Each replication draws from streams keyed by ``(seed, index)``, so the report
    does not depend on the worker count.
    """
    plan, ok = check_plan(cfg)
    report = SweepReport(cfg.name, plan.to_dict(), ok)
    n = int(cfg.replications)
    if n <= 0:
        return report
    w = thread_count(workers)
    if w == 1 or n == 1:
        report.runs = [run_once(cfg, i) for i in range(n)]
    else:
        with ThreadPoolExecutor(max_workers=w) as pool:
            report.runs = list(pool.map(lambda i: run_once(cfg, i), range(n)))
    return report


def plot_columns(cfg: ExperimentConfig, idx=0, oversample=16):
    """Dense-grid columns ``t, g, z, y, g_rec`` for one replication."""
    run, parts = run_once(cfg, idx, keep=True)
    if parts is None:
        raise ModbandError(run.get("error", "recovery failed"))
    sig, cap, rep = parts["signal"], parts["capture"], parts["report"]
    T = cfg.sample_period
    t = np.arange(cfg.K * oversample) * (T / oversample)
    g = sig.evaluate(t)
    if cap.architecture == "generalized":
        from .folding import fold_generalized

        z = fold_generalized(sig, cap.params, t[-1]).trace(t)
    else:
        z = fold_ideal(g, cap.lam)
    y = np.full(t.size, np.nan)
    y[::oversample] = cap.samples
    g_rec = reconstruct(cfg, rep, t)
    return {"t": t, "g": g, "z": z, "y": y, "g_rec": g_rec}


def empirical_plan(cfg: ExperimentConfig, sample_counts, probes=5):
    """Bracket the sampling periods ``tau / K`` at which recovery succeeds on probe signals."""
    good = []
    for K in sample_counts:
        trial = ExperimentConfig.from_dict({**cfg.to_dict(), "replications": probes,
                                            "sampling": {"period": cfg.period, "samples": int(K)},
                                            "recovery": {**cfg.recovery, "empirical": True}})
        try:
            rep = run_experiment(trial, workers=1)
        except ModbandError:
            continue
        if rep.all_succeeded:
            good.append(cfg.period / K)
    if not good:
        return SamplingPlan(math.inf, 0.0, cfg.wedge, "odd" if cfg.wedge % 2 else "even",
                            "unlimited-time" if cfg.recovery.get("method", "time") == "time" else "fourier-outer",
                            feasible=False, reason="no probed sampling period recovered every probe")
    return SamplingPlan(min(good), max(good), cfg.wedge, "odd" if cfg.wedge % 2 else "even",
                        "unlimited-time" if cfg.recovery.get("method", "time") == "time" else "fourier-outer",
                        feasible=True, reason="empirical")


__all__ = [
    "ExperimentConfig",
    "SweepReport",
    "check_plan",
    "empirical_plan",
    "fix_offset",
    "load_preset",
    "mse",
    "plan_for",
    "plot_columns",
    "run_experiment",
    "run_once",
    "thread_count",
]
