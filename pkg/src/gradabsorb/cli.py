"""Command-line entry point.

Subcommands:
    simulate  run one configuration and write trajectory artifacts
    profile   build the cone profile from a saved snapshot
    suite     execute a named verification suite
    validate  parse a config, echo its normalized form

Exit codes: 0 success, 1 configuration error, 2 numerical abort / failed
suite / degenerate input. All numeric results live in files; exit codes are
the only machine contract.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import RunConfig
from .errors import GradAbsorbError, ProfileError, ValidationError
from .grid import positivity_set
from .io import (read_field_bin, read_field_csv, read_json, write_field_bin,
                 write_field_csv, write_json, write_trajectory)
from .profile import build_vinf, eikonal_residual
from .suites import SUITES, run_suite

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2


def _load_config(path: str, mode_override=None) -> RunConfig:
    obj = read_json(path)
    if mode_override:
        obj["mode"] = mode_override
    return RunConfig.from_json(obj)


def cmd_simulate(args) -> int:
    try:
        cfg = _load_config(args.config, args.mode)
    except (OSError, json.JSONDecodeError, ValidationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out or "run-output")
    try:
        traj = cfg.run()
    except ValidationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    fmt = "bin" if cfg.grid.dim == 2 else "csv"
    write_trajectory(out, traj, config_json=cfg.to_json(), snapshot_format=fmt)
    if traj.aborted:
        print(f"numerical abort ({traj.status}) at t={traj.times[-1]:.6g}; "
              f"partial artifacts in {out}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"wrote {len(traj.snapshots)} snapshots to {out}")
    return EXIT_OK


def cmd_profile(args) -> int:
    path = Path(args.snapshot)
    if not path.exists():
        print(f"config error: no such snapshot {path}", file=sys.stderr)
        return EXIT_CONFIG
    if args.q <= 1.0:
        print("config error: q must be > 1", file=sys.stderr)
        return EXIT_CONFIG
    field = read_field_bin(path) if path.suffix == ".bin" else read_field_csv(path)
    eps = args.eps if args.eps is not None else 0.0
    mask = positivity_set(field, eps)
    if not mask.mask.any():
        print("degenerate snapshot: empty positivity set", file=sys.stderr)
        return EXIT_NUMERICAL
    if mask.mask.all():
        print("degenerate snapshot: no complement on the grid", file=sys.stderr)
        return EXIT_NUMERICAL
    prof = build_vinf(mask, args.q)
    out = Path(args.out or "profile-output")
    out.mkdir(parents=True, exist_ok=True)
    from .grid import Field

    if field.grid.dim == 2:
        write_field_bin(out / "dist.bin", Field(field.grid, prof.dist))
        write_field_bin(out / "vinf.bin", Field(field.grid, prof.vinf))
    else:
        write_field_csv(out / "dist.csv", Field(field.grid, prof.dist))
        write_field_csv(out / "vinf.csv", Field(field.grid, prof.vinf))
    try:
        resid = eikonal_residual(prof).to_json()
    except ProfileError as exc:
        resid = {"error": str(exc)}
    write_json(out / "profile_summary.json", {
        "q": args.q, "eps": eps,
        "peak_value": prof.peak_value,
        "peak_index": [int(i) for i in np.atleast_1d(prof.peak_index)],
        "positive_cells": int(mask.count),
        "support_radius": mask.support_radius,
        "eikonal_residual": resid,
    })
    print(f"wrote profile artifacts to {out}")
    return EXIT_OK


def cmd_suite(args) -> int:
    try:
        outcomes = run_suite(args.name, out_dir=args.out, jobs=args.jobs)
    except ValidationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for o in outcomes:
        print(o.line())
    return EXIT_OK if all(o.passed for o in outcomes) else EXIT_NUMERICAL


def cmd_validate(args) -> int:
    try:
        cfg = _load_config(args.config)
    except (OSError, json.JSONDecodeError, ValidationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(json.dumps(cfg.to_json(), indent=2, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="gradabsorb",
        description="Simulations and verification suites for slow diffusion "
                    "with gradient absorption")
    sub = ap.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a configuration")
    sim.add_argument("--config", required=True, help="run-config JSON path")
    sim.add_argument("--out", help="output directory (default run-output)")
    sim.add_argument("--mode", choices=("original", "rescaled", "hj-only", "plap-only"),
                     help="override the config's mode")
    sim.set_defaults(fn=cmd_simulate)

    prof = sub.add_parser("profile", help="cone profile from a snapshot")
    prof.add_argument("--snapshot", required=True, help="field CSV or binary file")
    prof.add_argument("--q", type=float, required=True)
    prof.add_argument("--eps", type=float, default=None,
                      help="positivity threshold (default 0: strict)")
    prof.add_argument("--out", help="output directory (default profile-output)")
    prof.set_defaults(fn=cmd_profile)

    su = sub.add_parser("suite", help="run a named verification suite")
    su.add_argument("--name", required=True, choices=sorted(SUITES))
    su.add_argument("--out", help="artifact directory")
    su.add_argument("--jobs", type=int, default=1, help="parallel task processes")
    su.set_defaults(fn=cmd_suite)

    val = sub.add_parser("validate", help="check and echo a run config")
    val.add_argument("--config", required=True)
    val.set_defaults(fn=cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except GradAbsorbError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
