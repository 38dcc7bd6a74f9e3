"""Bundled desk-scale verification suites.

Each task owns its runs and produces criterion outcomes; suites are named
bundles of tasks. The same entry points back the CLI `suite` subcommand and
the acceptance test module, so there is exactly one source of truth for
what passes.

Numbered criteria:
   1 self-similar fidelity of the pure-absorption flow
   2 sup-norm decay exponent sandwich
   3 localization (plus diffusion-only negative control)
   4 monotone positivity sets across all bundled runs
   5 convergence to the cone profile (1D and 2D)
   6 waiting time at the critical edge amplitude
   7 moving support above the critical edge amplitude
   8 barrier residuals and the bump-amplitude bracket
   9 distance transform vs exhaustive search
  10 upwind eikonal residual of the profile construction
  11 determinism and the discrete comparison principle
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import experiments as xp
from .config import RunConfig
from .errors import ValidationError
from .grid import Field, Grid, initial_bump, positivity_set
from .io import write_json, write_trajectory
from .operators import apply_stencil
from .params import Params, derive
from .profile import build_vinf, eikonal_residual, self_similar
from .stepper import StepControl, run
from .barriers import Barrier, max_amplitude, subsolution_margin

__all__ = ["CriterionOutcome", "SUITES", "run_suite", "TASKS"]

P315 = Params(3.0, 1.5, 1)
A0_315 = derive(P315).a0  # = 1/48


@dataclass
class CriterionOutcome:
    cid: str
    name: str
    passed: bool
    details: dict

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} criterion {self.cid}: {self.name}"


def _write(out_dir, name, payload) -> None:
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_json(out / name, payload)


def _save_run(out_dir, label, traj, config=None):
    if out_dir is not None:
        write_trajectory(Path(out_dir) / label, traj,
                         config_json=config.to_json() if config else None,
                         snapshot_format="bin" if traj.grid.dim == 2 else "csv")


# --------------------------------------------------------------- run configs

def config_main_frozen_cap(cells: int = 1024) -> RunConfig:
    """Decay/localization workhorse: cap with cubic edges at the largest
    support-freezing amplitude (edge coefficient 8a = a0)."""
    return RunConfig(
        params=P315, grid=Grid(dim=1, extent=4.0, cells=cells),
        initial={"kind": "cap", "amplitude": A0_315 / 8.0, "radius": 1.0,
                 "power": 3.0},
        mode="original", control=StepControl(t_end=1000.0))


def config_conv_1d(cells: int = 1024) -> RunConfig:
    """Generic unit cap for the 1D cone-convergence check."""
    return RunConfig(
        params=P315, grid=Grid(dim=1, extent=4.0, cells=cells),
        initial={"kind": "cap", "amplitude": 1.0, "radius": 1.0, "power": 2.0},
        mode="original", control=StepControl(t_end=1000.0))


def config_conv_2d() -> RunConfig:
    """2D disk data with the critical cubic edge (support provably frozen),
    integrated in decay-normalized variables."""
    p2 = Params(3.0, 1.5, 2)
    a0 = derive(p2).a0
    return RunConfig(
        params=p2, grid=Grid(dim=2, extent=1.85, cells=128),
        initial={"kind": "powerdist", "amplitude": a0, "radius": 1.55,
                 "power": 3.0},
        mode="rescaled", control=StepControl(t_end=1000.0))


def config_plap_control() -> RunConfig:
    """Diffusion-only negative control: support must spread like t^(1/4)."""
    return RunConfig(
        params=P315, grid=Grid(dim=1, extent=16.0, cells=2048),
        initial={"kind": "cap", "amplitude": 1.0, "radius": 1.0, "power": 2.0},
        mode="plap-only", control=StepControl(t_end=1000.0))


def config_hj_cone(q: float) -> RunConfig:
    """Pure-absorption flow started on the exact decaying cone at t = 1.

    The positivity set is invariant under this flow, so the domain margin
    can stay tight and all 1024 cells resolve the cone.
    """
    return RunConfig(
        params=Params(3.0, q, 1), grid=Grid(dim=1, extent=1.25, cells=1024),
        initial={"kind": "cap", "amplitude": 1.0, "radius": 1.0, "power": 2.0},
        mode="hj-only", control=StepControl(t_end=100.0), t_start=1.0)


def config_waiting(cells: int) -> RunConfig:
    """Critical-amplitude edge data capped per the sup-norm hypothesis."""
    delta = 0.5
    return RunConfig(
        params=P315, grid=Grid(dim=1, extent=4.0, cells=cells),
        initial={"kind": "powerdist", "amplitude": A0_315, "radius": 1.0,
                 "power": 3.0, "cap_height": A0_315 * delta**3},
        mode="original", control=StepControl(t_end=100.0))


def config_moving(cells: int = 1024, amp_factor: float = 50.0,
                  t_end: float = 10.0) -> RunConfig:
    p14 = Params(3.0, 1.4, 1)
    d = derive(p14)
    return RunConfig(
        params=p14, grid=Grid(dim=1, extent=4.0, cells=cells),
        initial={"kind": "powerdist", "amplitude": amp_factor * d.a0,
                 "radius": 1.0, "power": d.wait_exp},
        mode="original",
        control=StepControl(t_end=t_end, snapshot_first=1e-3))


# -------------------------------------------------------------------- tasks

def task_self_similar(out_dir=None):
    """Criterion 1: pure-absorption evolution from the decaying cone keeps
    sup error under 2% per decade of elapsed time up to t = 100."""
    outcomes = []
    details = {}
    worst_over_budget = 0.0
    for q in (1.5, 2.0):
        cfg = config_hj_cone(q)
        grid = cfg.grid
        inside = np.abs(grid.centers()) < 1.0
        prof = build_vinf(positivity_set(Field(grid, inside.astype(float)), 0.5), q)
        u0 = self_similar(prof, 1.0)
        # the actual initial state is the cone profile, not the config bump,
        # so the manifest omits the config and the snapshots speak for it
        traj = run(cfg.params, grid, u0, "hj-only", cfg.control, t_start=1.0)
        _save_run(out_dir, f"hj_q{q}", traj, None)
        series = []
        for k, t in enumerate(traj.times):
            if t <= 1.0:
                continue
            exact = self_similar(prof, t).values
            err = float(np.abs(traj.snapshots[k].values - exact).max() / exact.max())
            budget = 0.02 * math.log10(t)
            series.append({"t": float(t), "error": err, "budget": budget})
            worst_over_budget = max(worst_over_budget, err / budget)
        details[f"q={q}"] = series
    passed = worst_over_budget <= 1.0
    outcomes.append(CriterionOutcome(
        "1", "self-similar fidelity of the pure-absorption flow", passed,
        {"worst_error_over_budget": worst_over_budget, "series": details}))
    _write(out_dir, "report_self_similar.json",
           {"criterion": 1, "passed": passed,
            "worst_error_over_budget": worst_over_budget, "series": details})
    return {"outcomes": outcomes, "monotone": []}


def task_main(out_dir=None):
    """Criteria 2 and 3 (positive arm) on the frozen-edge cap run."""
    cfg = config_main_frozen_cap()
    traj = cfg.run()
    _save_run(out_dir, "main", traj, cfg)
    fit = xp.decay_fit(traj, "linf", window=(10.0, 1000.0))
    c2 = CriterionOutcome(
        "2", "sup-norm decay exponent -2.0 +/- 0.2 over [10, 1e3]",
        abs(fit.exponent + 2.0) <= 0.2 and not traj.aborted, fit.to_json())
    loc = xp.localization_check(traj, window_start=1.0, tolerance_cells=2.0)
    c3pos = {"localization": loc.to_json()}
    _write(out_dir, "report_main.json",
           {"criterion": [2, 3], "decay_fit": fit.to_json(),
            "localization": loc.to_json(), "status": traj.status})
    mono = xp.monotone_support_check(traj)
    return {"outcomes": [c2], "monotone": [("main", mono)],
            "c3_positive": loc, "c3_details": c3pos}


def task_plap_control(out_dir=None):
    """Criterion 3 negative arm: diffusion-only run must fail localization
    and its radius must grow like t^(0.25 +/- 0.05)."""
    cfg = config_plap_control()
    traj = cfg.run()
    _save_run(out_dir, "plap_control", traj, cfg)
    loc = xp.localization_check(traj, window_start=1.0, tolerance_cells=2.0)
    fit = xp.support_growth_fit(traj, window=(10.0, float(traj.times[-1])))
    _write(out_dir, "report_plap_control.json",
           {"criterion": 3, "localization": loc.to_json(),
            "radius_fit": fit.to_json(), "status": traj.status})
    return {"outcomes": [], "monotone": [], "c3_negative": (loc, fit)}


def _combine_c3(pos: xp.LocalizationReport, neg) -> CriterionOutcome:
    negloc, negfit = neg
    ok = (pos.passed and not negloc.passed
          and abs(negfit.exponent - 0.25) <= 0.05)
    return CriterionOutcome(
        "3", "localization with diffusion-only negative control", ok,
        {"drift_cells": pos.drift_cells, "control_drift_cells": negloc.drift_cells,
         "control_radius_exponent": negfit.exponent})


def task_conv_1d(out_dir=None):
    cfg = config_conv_1d()
    traj = cfg.run()
    _save_run(out_dir, "conv_1d", traj, cfg)
    rep = xp.convergence_to_vinf(traj)
    _write(out_dir, "report_conv_1d.json", {"criterion": 5, **rep.to_json()})
    mono = xp.monotone_support_check(traj)
    return {"outcomes": [], "monotone": [("conv_1d", mono)], "c5_1d": rep}


def task_conv_2d(out_dir=None):
    cfg = config_conv_2d()
    traj = cfg.run()
    _save_run(out_dir, "conv_2d", traj, cfg)
    rep = xp.convergence_to_vinf(traj)
    _write(out_dir, "report_conv_2d.json", {"criterion": 5, **rep.to_json()})
    mono = xp.monotone_support_check(traj)
    return {"outcomes": [], "monotone": [("conv_2d", mono)], "c5_2d": rep}


def _combine_c5(rep1d: xp.ConvergenceReport, rep2d: xp.ConvergenceReport) -> CriterionOutcome:
    return CriterionOutcome(
        "5", "convergence to the cone profile (1D cap, 2D disk)",
        rep1d.passed and rep2d.passed,
        {"final_error_1d": rep1d.final_error, "decreasing_1d": rep1d.decreasing,
         "final_error_2d": rep2d.final_error, "decreasing_2d": rep2d.decreasing,
         "tolerance": rep1d.tolerance})


def task_waiting(out_dir=None):
    """Criterion 6: critical-amplitude data, two resolutions, consistent."""
    reports = {}
    monos = []
    for cells in (512, 1024):
        cfg = config_waiting(cells)
        traj = cfg.run()
        _save_run(out_dir, f"waiting_{cells}", traj, cfg)
        reports[cells] = xp.waiting_time_check(traj, drift_tolerance_cells=1)
        monos.append((f"waiting_{cells}", xp.monotone_support_check(traj)))
    consistent = reports[512].passed == reports[1024].passed
    passed = reports[512].passed and reports[1024].passed and consistent
    out = CriterionOutcome(
        "6", "infinite waiting time at the critical edge amplitude", passed,
        {str(c): r.to_json() for c, r in reports.items()} | {"consistent": consistent})
    _write(out_dir, "report_waiting.json",
           {"criterion": 6, "passed": passed,
            "resolutions": {str(c): r.to_json() for c, r in reports.items()}})
    return {"outcomes": [out], "monotone": monos}


def task_moving(out_dir=None):
    """Criterion 7: super-critical edge invades immediately; onsets shrink
    with amplitude."""
    cfg = config_moving()
    traj = cfg.run()
    _save_run(out_dir, "moving", traj, cfg)
    rep = xp.moving_support_check(traj, sample_start=1e-2)
    sweep_grid = Grid(dim=1, extent=4.0, cells=512)
    p14 = Params(3.0, 1.4, 1)
    a0 = derive(p14).a0
    sweep = xp.onset_sweep(p14, sweep_grid, [m * a0 for m in (1.0, 2.0, 5.0, 10.0, 20.0, 50.0)],
                           radius=1.0, t_end=1.0)
    passed = rep.passed and sweep.monotone
    out = CriterionOutcome(
        "7", "moving support above the critical edge amplitude", passed,
        {"edge": rep.to_json(), "sweep": sweep.to_json()})
    _write(out_dir, "report_moving.json",
           {"criterion": 7, "passed": passed, "edge": rep.to_json(),
            "sweep": sweep.to_json()})
    # summary CSV for the amplitude sweep
    if out_dir is not None:
        lines = ["amplitude,onset_time"]
        for a, t in zip(sweep.amplitudes, sweep.onset_times):
            lines.append(f"{a!r},{'' if t is None else repr(t)}")
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        (Path(out_dir) / "sweep_summary.csv").write_text("\n".join(lines) + "\n")
    return {"outcomes": [out], "monotone": [("moving", xp.monotone_support_check(traj))]}


def task_barriers(out_dir=None):
    """Criterion 8: residual checks and the amplitude bracket."""
    params = P315
    # (iii) bracket of the bump amplitude
    a_r = max_amplitude(1.0, params)
    bracket_ok = 0.01 < a_r < 0.015
    # (i) decaying bump at half amplitude is a discrete subsolution
    grid = Grid(dim=1, extent=2.0, cells=1024)
    bump = Barrier(kind="decaying_bump", params=params, center=(0.0,),
                   radius=1.0, amplitude=a_r / 2.0)
    margins = [subsolution_margin(bump, grid, t) for t in (0.0, 0.5, 2.0)]
    sub_ok = max(margins) <= grid.dx
    # (ii) stationary vertex residual halves under refinement
    resids = {}
    for cells in (512, 1024):
        g = Grid(dim=1, extent=2.0, cells=cells)
        x = g.centers()
        vertex = Barrier(kind="stationary_vertex", params=params,
                         center=(0.3,), radius=1.5)
        s1 = vertex.on_grid(g, 0.0)
        outp = apply_stencil(Field(g, s1), params.p, params.q)
        rhs = outp.plap - outp.ham
        sel = (np.abs(x - 0.3) > 2 * g.dx) & (np.abs(x) < g.extent - 4 * g.dx)
        resids[cells] = float(np.abs(rhs[sel]).max())
    ratio = resids[1024] / resids[512]
    halve_ok = abs(ratio - 0.5) <= 0.15  # halves within +/-30%
    passed = bracket_ok and sub_ok and halve_ok
    details = {"amplitude_bound": a_r, "bracket_ok": bracket_ok,
               "subsolution_margins": margins, "subsolution_ok": sub_ok,
               "stationary_residuals": {str(k): v for k, v in resids.items()},
               "refinement_ratio": ratio, "halving_ok": halve_ok}
    _write(out_dir, "report_barriers.json", {"criterion": 8, "passed": passed, **details})
    return {"outcomes": [CriterionOutcome("8", "barrier residuals and amplitude bracket",
                                          passed, details)], "monotone": []}


def brute_force_sq(mask: np.ndarray) -> np.ndarray:
    """O(cells^2) exhaustive squared distances, the oracle for criterion 9."""
    shape = mask.shape
    idxs = np.indices(shape).reshape(len(shape), -1).T.astype(float)
    flat = mask.ravel()
    false_pts = idxs[~flat]
    out = np.zeros(flat.shape, dtype=float)
    true_ids = np.where(flat)[0]
    for k in true_ids:
        d = false_pts - idxs[k]
        out[k] = float((d * d).sum(axis=1).min())
    return out.reshape(shape)


def task_distance_oracle(out_dir=None, n_masks: int = 200):
    """Criterion 9: exact match with exhaustive search, zero tolerance."""
    from .backend import edt_sq

    rng = np.random.default_rng(315_159)
    mismatches = 0
    checked = 0
    for k in range(n_masks):
        if k % 2 == 0:
            n0 = int(rng.integers(8, 65))
            n1 = int(rng.integers(8, 65))
            mask = rng.random((n0, n1)) > rng.uniform(0.2, 0.8)
        else:
            n0 = int(rng.integers(8, 513))
            mask = rng.random(n0) > rng.uniform(0.2, 0.8)
        mask.flat[int(rng.integers(0, mask.size))] = False
        sq, _ = edt_sq(mask.astype(np.uint8))
        if not np.array_equal(sq, brute_force_sq(mask)):
            mismatches += 1
        checked += 1
    passed = mismatches == 0
    details = {"masks_checked": checked, "mismatches": mismatches}
    _write(out_dir, "report_distance_oracle.json",
           {"criterion": 9, "passed": passed, **details})
    return {"outcomes": [CriterionOutcome(
        "9", "distance transform equals exhaustive search", passed, details)],
        "monotone": []}


def task_eikonal(out_dir=None):
    """Criterion 10: upwind residual of the distance-normalized profile is
    below 3 dx on kept cells for interval and disk, halving under refinement."""
    results = {}
    ok = True
    for label, dim, pair in (("interval", 1, (512, 1024)), ("disk", 2, (128, 256))):
        maxes = []
        for cells in pair:
            g = Grid(dim=dim, extent=2.0, cells=cells)
            if dim == 1:
                inside = np.abs(g.centers()) < 1.0
            else:
                inside = g.radius() < 1.0
            prof = build_vinf(positivity_set(Field(g, inside.astype(float)), 0.5), 1.5)
            rep = eikonal_residual(prof)
            bound = 3.0 * g.dx
            ok &= rep.max_residual <= bound
            maxes.append(rep.max_residual)
            results[f"{label}_{cells}"] = {"max_residual": rep.max_residual,
                                           "bound_3dx": bound,
                                           "included_cells": rep.included_cells}
        ratio = maxes[1] / maxes[0] if maxes[0] > 0 else 0.0
        ok &= ratio <= 0.75 or maxes[1] <= 1e-12
        results[f"{label}_refinement_ratio"] = ratio
    _write(out_dir, "report_eikonal.json", {"criterion": 10, "passed": ok, **results})
    return {"outcomes": [CriterionOutcome(
        "10", "eikonal residual below 3 dx, halving under refinement", ok, results)],
        "monotone": []}


def task_determinism(out_dir=None):
    """Criterion 11: byte-identical repeats and 50 ordered pairs."""
    cfg = RunConfig(
        params=P315, grid=Grid(dim=1, extent=4.0, cells=512),
        initial={"kind": "cap", "amplitude": 1.0, "radius": 1.0, "power": 2.0},
        mode="original", control=StepControl(t_end=10.0, snapshot_first=0.1))

    def run_bytes():
        traj = cfg.run()
        lines = []
        for row in traj.series_rows():
            lines.append(",".join(repr(float(v)) for v in row[:7]) + f",{row[7]}")
        state = traj.snapshots[-1].values.tobytes()
        return "\n".join(lines).encode() + state

    identical = run_bytes() == run_bytes()

    rng = np.random.default_rng(2008)
    g = Grid(dim=1, extent=4.0, cells=32)
    pairs = []
    for _ in range(50):
        lo = rng.random(32) * rng.uniform(0.1, 2.0)
        lo[:2] = 0.0
        lo[-2:] = 0.0
        hi = lo + rng.random(32) * rng.uniform(0.0, 1.0)
        hi[:2] = 0.0
        hi[-2:] = 0.0
        pairs.append((Field(g, lo), Field(g, hi)))
    rep = xp.ordered_pair_check(P315, pairs, t_checks=(0.25, 1.0))
    passed = identical and rep.passed
    details = {"repeat_identical": identical, "pairs": rep.to_json()}
    _write(out_dir, "report_determinism.json", {"criterion": 11, "passed": passed, **details})
    return {"outcomes": [CriterionOutcome(
        "11", "bit-identical repeats and ordered-pair comparison", passed, details)],
        "monotone": []}


TASKS = {
    "self-similar": task_self_similar,
    "main": task_main,
    "plap-control": task_plap_control,
    "conv-1d": task_conv_1d,
    "conv-2d": task_conv_2d,
    "waiting": task_waiting,
    "moving": task_moving,
    "barriers": task_barriers,
    "distance-oracle": task_distance_oracle,
    "eikonal": task_eikonal,
    "determinism": task_determinism,
}

SUITES = {
    "decay": ("self-similar", "main"),
    "localization": ("main", "plap-control"),
    "convergence": ("conv-1d", "conv-2d", "distance-oracle", "eikonal"),
    "waiting-time": ("waiting", "moving"),
    "barriers": ("barriers", "determinism"),
    "all": tuple(TASKS),
}


def run_suite(name: str, out_dir=None, jobs: int = 1):
    """Execute a named suite; returns the ordered criterion outcomes.

    Criteria needing several tasks (3, 4, 5) are assembled when their parts
    are present; partial suites only report what they ran.
    """
    if name not in SUITES:
        raise ValidationError(f"unknown suite {name!r} (expected one of {sorted(SUITES)})")
    task_names = SUITES[name]
    results = {}
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futs = {t: pool.submit(_task_entry, t, str(out_dir) if out_dir else None)
                    for t in task_names}
            for t, fut in futs.items():
                results[t] = fut.result()
    else:
        for t in task_names:
            results[t] = TASKS[t](_task_out(out_dir, t))

    outcomes = []
    for t in task_names:
        outcomes.extend(results[t]["outcomes"])
    if "main" in results and "plap-control" in results:
        outcomes.append(_combine_c3(results["main"]["c3_positive"],
                                    results["plap-control"]["c3_negative"]))
    if "conv-1d" in results and "conv-2d" in results:
        outcomes.append(_combine_c5(results["conv-1d"]["c5_1d"],
                                    results["conv-2d"]["c5_2d"]))
    monos = [m for r in results.values() for m in r["monotone"]]
    if monos:
        ok = all(rep.passed for _, rep in monos)
        outcomes.append(CriterionOutcome(
            "4", "monotone positivity sets across bundled runs", ok,
            {label: rep.to_json() for label, rep in monos}))
    outcomes.sort(key=lambda o: (len(o.cid), o.cid))

    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        lines = ["criterion,name,passed"]
        for o in outcomes:
            lines.append(f"{o.cid},\"{o.name}\",{int(o.passed)}")
        (out / "summary.csv").write_text("\n".join(lines) + "\n")
        write_json(out / "summary.json",
                   [{"criterion": o.cid, "name": o.name, "passed": o.passed,
                     "details": o.details} for o in outcomes])
    return outcomes


def _task_out(out_dir, task_name):
    return None if out_dir is None else str(Path(out_dir) / task_name)


def _task_entry(task_name: str, out_dir):
    return TASKS[task_name](_task_out(out_dir, task_name))
