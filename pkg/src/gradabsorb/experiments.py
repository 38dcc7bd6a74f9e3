"""Desk-scale checks of the predicted large-time behaviour.

Each check consumes a Trajectory (runnable from saved artifacts: they only
need times, scalar series, and snapshot fields) and returns a small report
object with a verdict. Nothing here re-simulates physics.

Checks:
  decay_fit             log-log slope of a norm series (sup norm ~ t^(-1/(q-1)))
  localization_check    support radius stops growing (vs diffusion-only control)
  support_growth_fit    radius growth exponent (diffusion-only control ~ t^eta)
  monotone_support_check  positivity masks only ever grow (1-cell tolerance)
  convergence_to_vinf   decay-normalized field approaches the cone profile
  waiting_time_check    support edge frozen, edge point stays numerically zero
  moving_support_check  steep-edged data invades the edge point immediately
  ordered_pair_check    discrete comparison principle on lockstep pairs
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .grid import Field, Grid, initial_bump, positivity_set
from .operators import apply_stencil, cfl_dt
from .params import Params, derive
from .profile import LimitProfile, build_vinf
from .stepper import StepControl, Trajectory, run, step_original, unrescale_field

__all__ = [
    "FitResult", "fit_loglog", "decay_fit", "support_growth_fit",
    "LocalizationReport", "localization_check",
    "MonotoneSupportReport", "monotone_support_check",
    "ConvergenceReport", "convergence_to_vinf", "eventually_decreasing",
    "WaitingTimeReport", "waiting_time_check", "moving_support_check",
    "MovingSupportReport", "onset_sweep", "OnsetSweepReport",
    "ordered_pair_check", "PairComparisonReport",
]


# ----------------------------------------------------------------- fitting

@dataclass(frozen=True)
class FitResult:
    exponent: float
    intercept: float
    r_squared: float
    window: tuple
    n_points: int

    def to_json(self) -> dict:
        return {"exponent": self.exponent, "intercept": self.intercept,
                "r_squared": self.r_squared, "window": list(self.window),
                "n_points": self.n_points}


def fit_loglog(times, values, window=None, min_points: int = 6) -> FitResult:
    """Least-squares slope of log(values) against log(times).

    Default window: the final half of the log-time range (skipping any
    transient), per the fitting policy used throughout. Requires at least
    min_points positive samples and a window spanning real time range.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    pos = (t > 0.0) & (v > 0.0)
    if pos.sum() < 2:
        raise ValidationError("not enough positive samples to fit")
    if window is None:
        lo = math.exp(0.5 * (math.log(t[pos].min()) + math.log(t[pos].max())))
        window = (lo, float(t[pos].max()))
    sel = pos & (t >= window[0] * (1.0 - 1e-9)) & (t <= window[1] * (1.0 + 1e-9))
    if sel.sum() < min_points:
        raise ValidationError(
            f"only {int(sel.sum())} samples in fit window {window}; need {min_points}")
    lt, lv = np.log(t[sel]), np.log(v[sel])
    slope, intercept = np.polyfit(lt, lv, 1)
    resid = lv - (slope * lt + intercept)
    ss_tot = float(((lv - lv.mean()) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return FitResult(exponent=float(slope), intercept=float(intercept),
                     r_squared=r2, window=(float(window[0]), float(window[1])),
                     n_points=int(sel.sum()))


_SERIES = {"l1": "l1", "linf": "linf", "lipschitz": "lipschitz"}


def decay_fit(traj: Trajectory, which: str = "linf", window=None) -> FitResult:
    """Temporal decay exponent of a norm along the trajectory.

    Needs at least two decades of time coverage.
    """
    if which not in _SERIES:
        raise ValidationError(f"which must be one of {sorted(_SERIES)}")
    t = traj.times
    pos = t > 0
    if pos.sum() and t[pos].max() < 100.0 * t[pos].min():
        raise ValidationError("trajectory covers fewer than two decades of time")
    return fit_loglog(t, getattr(traj, _SERIES[which]), window=window)


def support_growth_fit(traj: Trajectory, window=None) -> FitResult:
    """Growth exponent of the support radius (diffusion-only control)."""
    return fit_loglog(traj.times, traj.support_radius, window=window)


# ------------------------------------------------------------ localization

@dataclass(frozen=True)
class LocalizationReport:
    passed: bool
    drift_cells: float
    radius_start: float
    radius_max: float
    window_start: float
    tolerance_cells: float

    def to_json(self) -> dict:
        return {"passed": self.passed, "drift_cells": self.drift_cells,
                "radius_start": self.radius_start, "radius_max": self.radius_max,
                "window_start": self.window_start,
                "tolerance_cells": self.tolerance_cells}


def localization_check(traj: Trajectory, window_start: float = 1.0,
                       tolerance_cells: float = 2.0) -> LocalizationReport:
    """Pass when the support radius grows at most tolerance_cells cells
    beyond its value at the first snapshot past window_start."""
    t = traj.times
    sel = t >= window_start * (1.0 - 1e-9)
    if not sel.any():
        raise ValidationError("no snapshots at or after the window start")
    r = traj.support_radius[sel]
    drift = (float(r.max()) - float(r[0])) / traj.grid.dx
    return LocalizationReport(
        passed=drift <= tolerance_cells, drift_cells=drift,
        radius_start=float(r[0]), radius_max=float(r.max()),
        window_start=window_start, tolerance_cells=tolerance_cells)


# ------------------------------------------------------- monotone support

@dataclass(frozen=True)
class MonotoneSupportReport:
    passed: bool
    worst_loss_cells: int
    pair_count: int
    tolerance: str

    def to_json(self) -> dict:
        return {"passed": self.passed, "worst_loss_cells": self.worst_loss_cells,
                "pair_count": self.pair_count, "tolerance": self.tolerance}


def _erode(mask: np.ndarray) -> np.ndarray:
    """Remove cells having a false axis neighbour (or touching the rim)."""
    out = mask.copy()
    for axis in range(mask.ndim):
        m = np.moveaxis(mask, axis, 0)
        o = np.moveaxis(out, axis, 0)
        o[1:] &= m[:-1]
        o[:-1] &= m[1:]
        o[0] = False
        o[-1] = False
    return out


def monotone_support_check(traj: Trajectory, eps: float = 0.0) -> MonotoneSupportReport:
    """Positivity masks of consecutive snapshots must be nested, up to the
    erosion of one boundary layer.

    The default threshold is strict (eps = 0): that is the positivity set
    itself, which the flow only ever grows. A positive threshold measures a
    level set of a decaying field instead, and its rim cells legitimately
    drop out over time; the 1-cell erosion tolerance absorbs single-layer
    rim losses either way while still catching genuine retreat (and failing
    loudly on e.g. a time-reversed trajectory)."""
    masks = [traj.mask(k, eps).mask for k in range(len(traj.snapshots))]
    worst = 0
    for a, b in zip(masks, masks[1:]):
        lost = _erode(a) & ~b
        worst = max(worst, int(lost.sum()))
    return MonotoneSupportReport(passed=worst == 0, worst_loss_cells=worst,
                                 pair_count=len(masks) - 1,
                                 tolerance="1-cell erosion")


# ------------------------------------------------------------- convergence

def eventually_decreasing(times, values, window_fraction: float = 0.3,
                          wiggle: float = 1.02) -> bool:
    """True when, over the final window_fraction of the log-time range, the
    series never rises by more than the wiggle factor per step and ends
    strictly below its value at the window start. The window skips the
    transient (where the data reorganizes toward the asymptotic shape) and
    judges only the tail, which is what "eventually" means here."""
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    pos = t > 0
    t, v = t[pos], v[pos]
    if len(t) < 3:
        return False
    lo = math.exp((1.0 - window_fraction) * math.log(t.max())
                  + window_fraction * math.log(t.min()))
    sel = t >= lo
    w = v[sel]
    if len(w) < 3:
        return False
    steps_ok = all(b <= a * wiggle for a, b in zip(w, w[1:]))
    return bool(steps_ok and w[-1] < w[0])


@dataclass(frozen=True)
class ConvergenceReport:
    passed: bool
    final_error: float
    errors: tuple
    times: tuple
    decreasing: bool
    tolerance: float
    profile_peak: float

    def to_json(self) -> dict:
        return {"passed": self.passed, "final_error": self.final_error,
                "errors": list(self.errors), "times": list(self.times),
                "decreasing": self.decreasing, "tolerance": self.tolerance,
                "profile_peak": self.profile_peak}


def convergence_to_vinf(traj: Trajectory, mask_eps: float = 0.0,
                        tolerance: float = 0.10,
                        profile: LimitProfile | None = None) -> ConvergenceReport:
    """Relative sup distance of t^(1/(q-1)) u(t) from the cone profile built
    on the final snapshot's positivity set.

    The terminal mask uses the strict threshold by default: the scheme keeps
    interior cells strictly positive and untouched cells exactly zero, so
    the strict mask is the discrete positivity set itself, and positivity
    sets only grow, making the last one the best terminal estimate.
    Rescaled-mode snapshots are mapped back to u before comparing. Passes
    when the final error is at or below `tolerance` and the series is
    eventually decreasing.
    """
    q = traj.params.q
    if profile is None:
        final = traj.snapshots[-1]
        if traj.mode == "rescaled":
            final = unrescale_field(final, traj.times[-1], q)
        ps = positivity_set(final, mask_eps)
        if not ps.mask.any():
            raise ValidationError("final snapshot has an empty positivity set")
        profile = build_vinf(ps, q)
    dexp = 1.0 / (q - 1.0)
    peak = profile.peak_value
    ts, es = [], []
    for k, t in enumerate(traj.times):
        if t <= 0.0:
            continue
        u = traj.snapshots[k]
        if traj.mode == "rescaled":
            u = unrescale_field(u, t, q)
        es.append(float(np.abs(t**dexp * u.values - profile.vinf).max()) / peak)
        ts.append(float(t))
    dec = eventually_decreasing(ts, es)
    return ConvergenceReport(
        passed=(es[-1] <= tolerance) and dec, final_error=es[-1],
        errors=tuple(es), times=tuple(ts), decreasing=dec,
        tolerance=tolerance, profile_peak=peak)


# ------------------------------------------------------------ waiting time

def _edge_cells_outside(mask0: np.ndarray):
    """Indices of the first cells just outside a 1D initial support."""
    idx = np.where(mask0)[0]
    if len(idx) == 0:
        raise ValidationError("initial mask is empty")
    out = []
    if idx.min() > 0:
        out.append(int(idx.min()) - 1)
    if idx.max() < len(mask0) - 1:
        out.append(int(idx.max()) + 1)
    return idx, out


@dataclass(frozen=True)
class WaitingTimeReport:
    passed: bool
    endpoint_drift_cells: int
    edge_value_max: float
    eps_pos: float
    drift_tolerance_cells: int
    edge_skin_values: tuple

    def to_json(self) -> dict:
        return {"passed": self.passed,
                "endpoint_drift_cells": self.endpoint_drift_cells,
                "edge_value_max": self.edge_value_max, "eps_pos": self.eps_pos,
                "drift_tolerance_cells": self.drift_tolerance_cells,
                "edge_skin_values": list(self.edge_skin_values)}


def waiting_time_check(traj: Trajectory, drift_tolerance_cells: int = 1) -> WaitingTimeReport:
    """Support endpoints must stay put and the first outside cells must stay
    below the run's positivity threshold for the whole trajectory.

    The verdict applies the stated tolerances literally. Note that the
    explicit monotone scheme maintains an equilibrium skin of height about
    (edge coefficient)^((p-1)/q) dx^(1+((w-1)(p-1)-1)/q) on the first
    outside cells (w the edge power); the report carries those skin values
    so the margin structure is visible either way.
    """
    if traj.grid.dim != 1:
        raise ValidationError("waiting-time check is defined for 1D runs")
    m0 = traj.mask(0).mask
    idx0, outside = _edge_cells_outside(m0)
    lo0, hi0 = int(idx0.min()), int(idx0.max())
    drift = 0
    edge_max = 0.0
    for k in range(len(traj.snapshots)):
        m = traj.mask(k).mask
        ii = np.where(m)[0]
        if len(ii):
            drift = max(drift, abs(int(ii.min()) - lo0), abs(int(ii.max()) - hi0))
        for c in outside:
            edge_max = max(edge_max, float(traj.snapshots[k].values[c]))
    skin = tuple(float(traj.snapshots[-1].values[c]) for c in outside)
    return WaitingTimeReport(
        passed=(drift <= drift_tolerance_cells) and (edge_max <= traj.eps_pos),
        endpoint_drift_cells=drift, edge_value_max=edge_max,
        eps_pos=traj.eps_pos, drift_tolerance_cells=drift_tolerance_cells,
        edge_skin_values=skin)


@dataclass(frozen=True)
class MovingSupportReport:
    passed: bool
    first_positive_time: float | None
    min_edge_value_after: float
    sample_start: float
    eps_pos: float

    def to_json(self) -> dict:
        return {"passed": self.passed,
                "first_positive_time": self.first_positive_time,
                "min_edge_value_after": self.min_edge_value_after,
                "sample_start": self.sample_start, "eps_pos": self.eps_pos}


def moving_support_check(traj: Trajectory, sample_start: float = 1e-2) -> MovingSupportReport:
    """The original support edge must be invaded: the first outside cells
    carry values above the positivity threshold at every sampled time at or
    after sample_start."""
    if traj.grid.dim != 1:
        raise ValidationError("moving-support check is defined for 1D runs")
    m0 = traj.mask(0).mask
    _, outside = _edge_cells_outside(m0)
    first_pos = None
    min_after = math.inf
    for k, t in enumerate(traj.times):
        val = min(float(traj.snapshots[k].values[c]) for c in outside)
        if val > traj.eps_pos and first_pos is None and t > traj.t_start:
            first_pos = float(t)
        if t >= sample_start * (1.0 - 1e-9):
            min_after = min(min_after, val)
    return MovingSupportReport(
        passed=min_after > traj.eps_pos, first_positive_time=first_pos,
        min_edge_value_after=min_after, sample_start=sample_start,
        eps_pos=traj.eps_pos)


@dataclass(frozen=True)
class OnsetSweepReport:
    amplitudes: tuple
    onset_times: tuple  # None where the edge never activates
    monotone: bool

    def to_json(self) -> dict:
        return {"amplitudes": list(self.amplitudes),
                "onset_times": list(self.onset_times), "monotone": self.monotone}


def onset_sweep(params: Params, grid: Grid, amplitudes, radius: float = 1.0,
                t_end: float = 1.0, snapshot_first: float = 1e-3) -> OnsetSweepReport:
    """Sweep the edge coefficient of power-edge data and record when the
    first outside cell activates; larger amplitudes must never wait longer."""
    d = derive(params)
    onsets = []
    for a in amplitudes:
        u0 = initial_bump(grid, "powerdist", amplitude=a, radius=radius,
                          power=d.wait_exp)
        traj = run(params, grid, u0, "original",
                   StepControl(t_end=t_end, snapshot_first=snapshot_first))
        rep = moving_support_check(traj, sample_start=snapshot_first)
        onsets.append(rep.first_positive_time)
    mono = True
    for (a1, o1), (a2, o2) in zip(zip(amplitudes, onsets), list(zip(amplitudes, onsets))[1:]):
        t1 = math.inf if o1 is None else o1
        t2 = math.inf if o2 is None else o2
        if a2 > a1 and t2 > t1:
            mono = False
    return OnsetSweepReport(amplitudes=tuple(float(a) for a in amplitudes),
                            onset_times=tuple(onsets), monotone=mono)


# ------------------------------------------------- comparison (pair-march)

@dataclass(frozen=True)
class PairComparisonReport:
    passed: bool
    worst_violation: float
    tolerance: float
    pairs: int

    def to_json(self) -> dict:
        return {"passed": self.passed, "worst_violation": self.worst_violation,
                "tolerance": self.tolerance, "pairs": self.pairs}


def ordered_pair_check(params: Params, pairs, t_checks, safety: float = 0.4,
                       tolerance: float = 1e-12) -> PairComparisonReport:
    """March ordered initial pairs in lockstep (shared steps, each admissible
    for both states) and verify the ordering at every checkpoint.

    This is the discrete comparison principle of the monotone update; the
    lockstep is what the principle speaks about, and adaptive runs inherit
    it up to consistency error.
    """
    worst = -math.inf
    for lo_field, hi_field in pairs:
        if float((lo_field.values - hi_field.values).max()) > 0.0:
            raise ValidationError("pair is not ordered at t = 0")
        lo, hi = lo_field, hi_field
        t = 0.0
        for t_target in sorted(t_checks):
            while t < t_target:
                out_lo = apply_stencil(lo, params.p, params.q)
                out_hi = apply_stencil(hi, params.p, params.q)
                dt = safety * min(
                    cfl_dt(lo.grid.dim, lo.grid.dx, out_lo.max_diff, out_lo.max_wave),
                    cfl_dt(hi.grid.dim, hi.grid.dx, out_hi.max_diff, out_hi.max_wave))
                dt = min(dt, t_target - t)
                lo, _ = step_original(lo, dt, params)
                hi, _ = step_original(hi, dt, params)
                t += dt
            worst = max(worst, float((lo.values - hi.values).max()))
    return PairComparisonReport(passed=worst <= tolerance, worst_violation=worst,
                                tolerance=tolerance, pairs=len(pairs))
