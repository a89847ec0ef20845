"""Command-line entry point: ``modband <subcommand>``.

Exit codes: 0 success, 2 infeasible plan, 3 recovery failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .exceptions import InfeasiblePlanError, ModbandError
from .folding import HysteresisParams, capture_generalized, capture_ideal, fold_nonideal, jittered_residue
from .harness import PRESETS, ExperimentConfig, load_preset, plot_columns, run_experiment
from .metrics import fix_offset, mse
from .planner import (
    REGIMES,
    SamplingPlan,
    am_fourier_rate,
    am_time_rate,
    baseband_relocation,
    fp_classic,
    lemma1_range,
    theorem1_range,
    theorem3_ranges,
    us_classic,
)
from .recovery_fourier import recover_bandpass_fourier
from .recovery_time import UsAlgConfig, beta_bound, recover_bandpass_time
from .serialization import ingest_capture, load_signal, save_signal, write_capture, write_plot_csv
from .signal_model import AmParams, BandSpec, samples_per_period, synth_am, synth_random_bandpass

EXIT_OK, EXIT_INFEASIBLE, EXIT_FAILED = 0, 2, 3


def parse_number(text):
    """Float with an optional ``pi`` factor: ``50pi``, ``0.5*pi``, ``pi``."""
    t = text.strip().lower().replace(" ", "")
    if t.endswith("pi"):
        head = t[:-2].rstrip("*")
        scale = {"": 1.0, "+": 1.0, "-": -1.0}.get(head)
        return (float(head) if scale is None else scale) * math.pi
    return float(t)


def parse_band(text):
    lo, hi = (parse_number(x) for x in text.split(","))
    return BandSpec(lo, hi)


def _emit(obj, out=None):
    text = json.dumps(obj, indent=2, sort_keys=True, default=float)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_synth(a):
    if a.am:
        vals = [parse_number(x) for x in a.am.split(",")]
        sig = synth_am(AmParams(*vals).snapped(a.tau) if a.snap else AmParams(*vals), a.tau)
    else:
        sig = synth_random_bandpass(parse_band(a.band), a.tau, a.seed)
    if a.out:
        save_signal(sig, a.out)
    else:
        _emit(sig.to_dict())
    return EXIT_OK


def cmd_fold(a):
    sig = load_signal(a.signal)
    K = a.samples if a.samples else samples_per_period(sig.period, a.ts)
    T = sig.period / K
    if a.arch == "ideal":
        cap = capture_ideal(sig, a.lam, T, K)
    elif a.arch == "generalized":
        cap = capture_generalized(sig, HysteresisParams(a.lam, a.hysteresis, a.transient), T, K)
    else:
        gamma = sig.evaluate(np.arange(K) * T)
        cap = fold_nonideal(gamma, jittered_residue(gamma, a.lam, a.jitter, a.seed), T, a.lam)
    if not a.with_gamma:
        cap.ground_truth = None
    write_capture(cap, a.out)
    return EXIT_OK


def make_plan(a):
    band = parse_band(a.band)
    P = a.wedge
    r = a.regime
    if r == "nyquist-lemma":
        plan = lemma1_range(band, P)
    elif r == "unlimited-time":
        plan = theorem1_range(band, P)
    elif r == "am-time":
        plan = am_time_rate(band, max(1, P // 2))
    elif r == "am-fourier":
        plan = am_fourier_rate(a.tau, band, a.folds, max(1, P // 2))
    elif r in ("fourier-outer", "fourier-inner"):
        step = 2 * math.pi / a.tau
        ql = round(band.omega_low / step)
        qu = round(band.omega_high / step)
        outer, inner = theorem3_ranges(a.tau, ql, qu, a.folds, P)
        plan = outer if r == "fourier-outer" else inner
    elif r == "fp-classic":
        plan = fp_classic(a.tau, band.omega_high, a.folds)
    else:  # us-classic
        t_us, _ = us_classic(band.omega_high, 1.0, 1.0)
        plan = SamplingPlan(0.0, t_us, 1, "odd", "us-classic", band.omega_high)
    omega_base = plan.baseband_bandwidth
    if P > 1 and r in ("nyquist-lemma", "unlimited-time"):
        try:
            omega_base = baseband_relocation(band, P)[1]
        except InfeasiblePlanError:
            pass
    return plan, omega_base


def cmd_plan(a):
    plan, omega_base = make_plan(a)
    _emit({
        "t_min": plan.t_min,
        "t_max": plan.t_max,
        "feasible": bool(plan.feasible),
        "reason": plan.reason,
        "omega_base": omega_base,
    })
    return EXIT_OK if plan.feasible else EXIT_INFEASIBLE


def cmd_recover(a):
    cap = ingest_capture(a.capture)
    if a.lam is not None:
        cap.lam = a.lam
    if cap.lam is None:
        raise SystemExit("capture has no threshold; pass --lam")
    band = parse_band(a.band)
    tau = a.tau if a.tau else cap.period
    if a.method == "fourier":
        rep, _ = recover_bandpass_fourier(cap, tau, band, a.folds, a.wedge, a.set, snap_2lambda=a.snap_2lambda)
    else:
        amp = a.beta
        if amp is None:
            if cap.ground_truth is None:
                raise SystemExit("time-domain recovery needs --beta (amplitude bound) or a gamma column")
            amp = float(np.max(np.abs(cap.ground_truth)))
        cfg = UsAlgConfig(cap.lam, beta_bound(amp, cap.lam), a.order, band, cap.sample_period, a.wedge)
        rep, _ = recover_bandpass_time(cap, cfg)
    _emit(rep.to_dict(), a.report)
    if a.out:
        write_plot_csv(a.out, {"k": np.arange(cap.K), "t": cap.times, "y": cap.samples, "gamma_rec": rep.recovered})
    return EXIT_OK if rep.success else EXIT_FAILED


def _read_column(path, name):
    import csv

    with open(path, newline="") as fh:
        return np.array([float(r[name]) for r in csv.DictReader(fh)])


def cmd_eval(a):
    truth = _read_column(a.truth, a.truth_column)
    rec = _read_column(a.recovered, a.recovered_column)
    if a.lam:
        rec = fix_offset(rec, truth, a.lam)
    _emit({"mse": mse(rec, truth), "samples": int(truth.size)})
    return EXIT_OK


def _finish_sweep(report, a):
    text = report.to_json()
    if a.out:
        Path(a.out).write_text(text + "\n")
    else:
        print(json.dumps(report.aggregates, indent=2, sort_keys=True, default=float))
    return EXIT_OK if report.all_succeeded else EXIT_FAILED


def _configure(cfg, a):
    if a.replications is not None:
        cfg.replications = a.replications
    if a.seed is not None:
        cfg.seed = a.seed
    return cfg


def cmd_mc(a):
    cfg = _configure(ExperimentConfig.from_file(a.config), a)
    return _finish_sweep(run_experiment(cfg, a.workers), a)


def cmd_preset(a):
    cfg = _configure(load_preset(a.name), a)
    if a.plot:
        write_plot_csv(a.plot, plot_columns(cfg))
    return _finish_sweep(run_experiment(cfg, a.workers), a)


def build_parser():
    p = argparse.ArgumentParser(prog="modband", description="Modulo sampling of bandpass signals")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="synthesize a test signal as JSON")
    s.add_argument("--band", help="omega_low,omega_high in rad/s (suffix 'pi' allowed)")
    s.add_argument("--am", help="amp,omega_msg,phase_msg,omega_carrier,phase_carrier")
    s.add_argument("--snap", action="store_true", help="snap AM frequencies to the 2pi/tau grid")
    s.add_argument("--tau", type=float, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_synth)

    f = sub.add_parser("fold", help="fold and sample a signal into a capture CSV")
    f.add_argument("--signal", required=True)
    f.add_argument("--lam", type=float, required=True)
    f.add_argument("--ts", type=float)
    f.add_argument("--samples", type=int)
    f.add_argument("--arch", choices=("ideal", "generalized", "nonideal"), default="ideal")
    f.add_argument("--hysteresis", type=float, default=0.0)
    f.add_argument("--transient", type=float, default=0.0)
    f.add_argument("--jitter", type=float, default=0.1)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--no-gamma", dest="with_gamma", action="store_false")
    f.add_argument("--out", required=True)
    f.set_defaults(func=cmd_fold)

    pl = sub.add_parser("plan", help="admissible sampling periods")
    pl.add_argument("--band", required=True)
    pl.add_argument("--tau", type=float, default=2.0)
    pl.add_argument("--wedge", type=int, default=1)
    pl.add_argument("--folds", type=int, default=0)
    pl.add_argument("--regime", choices=REGIMES, default="unlimited-time")
    pl.set_defaults(func=cmd_plan)

    r = sub.add_parser("recover", help="unfold a capture CSV")
    r.add_argument("--capture", required=True)
    r.add_argument("--band", required=True)
    r.add_argument("--tau", type=float)
    r.add_argument("--wedge", type=int, default=1)
    r.add_argument("--method", choices=("time", "fourier"), default="time")
    r.add_argument("--set", choices=("outer", "inner", "auto"), default="auto")
    r.add_argument("--folds", type=int, default=0)
    r.add_argument("--snap-2lambda", action="store_true")
    r.add_argument("--order", type=int)
    r.add_argument("--beta", type=float, help="amplitude bound for time-domain recovery")
    r.add_argument("--lam", type=float)
    r.add_argument("--report")
    r.add_argument("--out", help="CSV with the recovered samples")
    r.set_defaults(func=cmd_recover)

    e = sub.add_parser("eval", help="MSE between two CSV columns")
    e.add_argument("truth")
    e.add_argument("recovered")
    e.add_argument("--truth-column", default="gamma")
    e.add_argument("--recovered-column", default="gamma_rec")
    e.add_argument("--lam", type=float, help="remove the 2*lam offset before scoring")
    e.set_defaults(func=cmd_eval)

    for name, func, helptext in (("mc", cmd_mc, "Monte-Carlo sweep from a config file"),
                                 ("preset", cmd_preset, "run a shipped preset")):
        m = sub.add_parser(name, help=helptext)
        if name == "mc":
            m.add_argument("config")
        else:
            m.add_argument("name", choices=PRESETS)
            m.add_argument("--plot", help="write plot columns t,g,z,y,g_rec to this CSV")
        m.add_argument("--replications", type=int)
        m.add_argument("--seed", type=int)
        m.add_argument("--workers", type=int)
        m.add_argument("--out")
        m.set_defaults(func=func)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InfeasiblePlanError as exc:
        print(f"infeasible plan: {exc.reason}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ModbandError as exc:
        print(f"recovery failed: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
