"""Artifact files: field snapshots (CSV and flat binary), scalar series CSV,
run manifests, and experiment reports.

All text output uses repr-round-trip float formatting, so repeated runs of
the same configuration produce byte-identical files.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .grid import Field, Grid

__all__ = [
    "write_field_csv", "read_field_csv", "write_field_bin", "read_field_bin",
    "write_series_csv", "read_series_csv", "write_json", "read_json",
    "write_trajectory", "load_series",
]

SERIES_COLUMNS = ("t", "tau", "l1", "linf", "lipschitz", "supportRadius",
                  "dt", "clampCount")

_BIN_HEADER = struct.Struct("<qqd")  # dim, cells, dx (little-endian)


def _fmt(x: float) -> str:
    return repr(float(x))


def write_field_csv(path, field: Field) -> None:
    g = field.grid
    lines = []
    if g.dim == 1:
        lines.append("index,x,value")
        c = g.centers()
        for i, v in enumerate(field.values):
            lines.append(f"{i},{_fmt(c[i])},{_fmt(v)}")
    else:
        lines.append("i,j,x,y,value")
        c = g.centers()
        for i in range(g.cells):
            for j in range(g.cells):
                lines.append(f"{i},{j},{_fmt(c[i])},{_fmt(c[j])},{_fmt(field.values[i, j])}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_field_csv(path) -> Field:
    text = Path(path).read_text().strip().splitlines()
    header = text[0].split(",")
    rows = [line.split(",") for line in text[1:]]
    if header[:3] == ["index", "x", "value"]:
        xs = np.array([float(r[1]) for r in rows])
        vals = np.array([float(r[2]) for r in rows])
        n = len(vals)
        dx = xs[1] - xs[0]
        extent = -(xs[0] - dx / 2.0)
        return Field(Grid(dim=1, extent=extent, cells=n), vals)
    if header[:5] == ["i", "j", "x", "y", "value"]:
        n = int(rows[-1][0]) + 1
        vals = np.empty((n, n))
        for r in rows:
            vals[int(r[0]), int(r[1])] = float(r[4])
        xs = sorted({float(r[2]) for r in rows})
        dx = xs[1] - xs[0]
        extent = -(xs[0] - dx / 2.0)
        return Field(Grid(dim=2, extent=extent, cells=n), vals)
    raise ValidationError(f"unrecognized field CSV header: {header}")


def write_field_bin(path, field: Field) -> None:
    g = field.grid
    with open(path, "wb") as fh:
        fh.write(_BIN_HEADER.pack(g.dim, g.cells, g.dx))
        fh.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes())


def read_field_bin(path) -> Field:
    raw = Path(path).read_bytes()
    dim, cells, dx = _BIN_HEADER.unpack_from(raw, 0)
    count = cells**dim
    vals = np.frombuffer(raw, dtype="<f8", count=count, offset=_BIN_HEADER.size)
    shape = (cells,) * dim
    return Field(Grid(dim=dim, extent=cells * dx / 2.0, cells=cells),
                 vals.reshape(shape).copy())


def write_series_csv(path, traj) -> None:
    lines = [",".join(SERIES_COLUMNS)]
    for row in traj.series_rows():
        t, tau, l1, linf, lip, rad, dt, clamp = row
        lines.append(",".join([_fmt(t), _fmt(tau), _fmt(l1), _fmt(linf),
                               _fmt(lip), _fmt(rad), _fmt(dt), str(clamp)]))
    Path(path).write_text("\n".join(lines) + "\n")


def read_series_csv(path) -> dict:
    text = Path(path).read_text().strip().splitlines()
    header = text[0].split(",")
    cols = {name: [] for name in header}
    for line in text[1:]:
        for name, cell in zip(header, line.split(",")):
            cols[name].append(float(cell))
    return {name: np.array(vals) for name, vals in cols.items()}


def _json_default(o):
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def write_json(path, obj) -> None:
    Path(path).write_text(
        json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n")


def read_json(path):
    return json.loads(Path(path).read_text())


def write_trajectory(out_dir, traj, config_json: dict | None = None,
                     snapshot_format: str = "csv") -> dict:
    """Write series.csv, per-snapshot field files, and manifest.json.

    Returns the manifest dictionary. Large 2D states go to flat binary when
    snapshot_format='bin'.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_series_csv(out / "series.csv", traj)
    artifacts = ["series.csv"]
    for k, snap in enumerate(traj.snapshots):
        if snapshot_format == "bin":
            name = f"snapshot_{k:04d}.bin"
            write_field_bin(out / name, snap)
        else:
            name = f"snapshot_{k:04d}.csv"
            write_field_csv(out / name, snap)
        artifacts.append(name)
    from .params import derive

    d = derive(traj.params)
    manifest = {
        "mode": traj.mode,
        "params": traj.params.to_json(),
        "derived": {
            "q1": d.q1, "q_star": d.q_star, "q2": d.q2, "xi": d.xi,
            "eta": d.eta, "a0": None if np.isnan(d.a0) else d.a0,
            "decay_exp": d.decay_exp,
            "wait_exp": None if np.isnan(d.wait_exp) else d.wait_exp,
        },
        "grid": {"dim": traj.grid.dim, "extent": traj.grid.extent,
                 "cells": traj.grid.cells, "dx": traj.grid.dx},
        "eps_pos": traj.eps_pos,
        "t_start": traj.t_start,
        "status": traj.status,
        "aborted": traj.aborted,
        "snapshot_times": [float(t) for t in traj.times],
        "artifacts": artifacts,
        "snapshot_format": snapshot_format,
    }
    if traj.config_hash is not None:
        manifest["config_hash"] = traj.config_hash
    if config_json is not None:
        manifest["config"] = config_json
    write_json(out / "manifest.json", manifest)
    return manifest


def load_series(run_dir) -> dict:
    """Series plus manifest of a written run (for artifact-only analysis)."""
    run = Path(run_dir)
    return {"series": read_series_csv(run / "series.csv"),
            "manifest": read_json(run / "manifest.json")}
