"""CSV/JSON serialization for signals, captures and plot data."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .folding import FoldedCapture, HysteresisParams, IdealModuloParams, NonIdealResidue
from .signal_model import PeriodicBandpassSignal

SPACING_RTOL = 1e-6


def save_signal(sig: PeriodicBandpassSignal, path):
    Path(path).write_text(json.dumps(sig.to_dict(), indent=2))


def load_signal(path) -> PeriodicBandpassSignal:
    return PeriodicBandpassSignal.from_dict(json.loads(Path(path).read_text()))


def sidecar_path(path):
    p = Path(path)
    return p.with_suffix(".json") if p.suffix else p.with_name(p.name + ".json")


def write_capture(capture: FoldedCapture, path):
    """CSV ``k,t,y[,gamma]`` plus a side-car JSON with the architecture parameters."""
    path = Path(path)
    has_gt = capture.ground_truth is not None
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "t", "y"] + (["gamma"] if has_gt else []))
        for k in range(capture.K):
            row = [k, repr(float(k * capture.sample_period)), repr(float(capture.samples[k]))]
            if has_gt:
                row.append(repr(float(capture.ground_truth[k])))
            w.writerow(row)
    sidecar_path(path).write_text(json.dumps(capture.params_dict(), indent=2, default=float))
    return path


def _params_from_dict(arch, d):
    if d is None:
        return None
    if arch == "ideal":
        return IdealModuloParams(d["lam"])
    if arch == "generalized":
        return HysteresisParams(d["lam"], d.get("hysteresis", 0.0), d.get("transient", 0.0))
    return NonIdealResidue(d.get("breakpoints", ()), d.get("levels", ()))


def ingest_capture(path) -> FoldedCapture:
    """Read a capture CSV; ``T_S`` is inferred from the ``t`` column."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader)]
        if header[:3] != ["k", "t", "y"] or len(header) > 4 or (len(header) == 4 and header[3] != "gamma"):
            raise ValueError(f"expected header k,t,y[,gamma], got {','.join(header)}")
        rows = []
        for i, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(f"line {i}: expected {len(header)} fields, got {len(row)}")
            try:
                rows.append([float(x) for x in row])
            except ValueError as exc:
                raise ValueError(f"line {i}: {exc}") from None
    if len(rows) < 2:
        raise ValueError("capture needs at least two rows")
    data = np.array(rows)
    k = data[:, 0]
    if not np.array_equal(k, np.arange(len(k))):
        raise ValueError("k column must be 0, 1, 2, ... in order")
    dt = np.diff(data[:, 1])
    T = float(np.mean(dt))
    if T <= 0 or np.max(np.abs(dt - T)) > SPACING_RTOL * T:
        raise ValueError("t column is not uniformly spaced")
    side = {}
    sp = sidecar_path(path)
    if sp.exists():
        side = json.loads(sp.read_text())
    arch = side.get("architecture", "ideal")
    params = _params_from_dict(arch, side.get("params"))
    meta = {k: v for k, v in side.items() if k not in ("architecture", "params", "lam", "sample_period")}
    gt = data[:, 3] if data.shape[1] == 4 else None
    return FoldedCapture(data[:, 2], T, arch, params, gt, side.get("lam"), meta)


def _cell(col, i):
    if i >= len(col) or np.isnan(col[i]):
        return ""
    return repr(float(col[i]))


def write_plot_csv(path, columns: dict):
    """Write columns (e.g. ``t, g, z, y, g_rec``); NaN and missing values become empty cells."""
    names = list(columns)
    n = max(len(v) for v in columns.values())
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for i in range(n):
            w.writerow([_cell(columns[c], i) for c in names])
    return path
