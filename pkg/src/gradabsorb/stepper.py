"""Explicit adaptive time integration and the self-similar change of variables.

Four flow modes share one driver:

    original:   du/dt = plap(u) - ham(u)
    hj-only:    du/dt = -ham(u)                 (diffusion switched off)
    plap-only:  du/dt = plap(u)                 (absorption switched off)
    rescaled:   dv/dtau = exp(-(p-1-q) tau) plap(v) - ham(v) + v,
                the original flow rewritten in decay-normalized variables
                v = (1 + (q-1) t)^(1/(q-1)) u,  tau = ln(1 + (q-1) t)/(q-1)

Steps are forward Euler with dt = safety * min(diffusive bound, wave bound)
recomputed every step and truncated to land exactly on snapshot times.
Round-off negatives are clamped to zero (counted); anything worse aborts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field, replace

import numpy as np

from . import backend
from .errors import NumericalAbort, ValidationError
from .grid import EPS_POS_FACTOR, Field, Grid, PositivitySet, norms, positivity_set
from .operators import apply_stencil
from .params import Params

__all__ = [
    "StepControl", "Trajectory", "MODES",
    "time_map", "time_map_inverse", "rescale_field", "unrescale_field",
    "step_original", "step_rescaled", "geometric_times", "run",
]

MODES = ("original", "rescaled", "hj-only", "plap-only")

#: fraction of the initial sup norm below which a round-off negative is
#: forgiven (clamped); anything more negative indicates a broken step
NEG_ABORT_FACTOR = 1e-14

_STATUS_NAMES = {
    backend.STATUS_OK: "ok",
    backend.STATUS_NAN: "nan",
    backend.STATUS_NEGATIVE: "negative",
    backend.STATUS_BOUNDARY: "boundary",
    backend.STATUS_STALLED: "stalled",
}


@dataclass(frozen=True)
class StepControl:
    """Step-size policy and output schedule."""

    t_end: float
    safety: float = 0.4
    dt_min: float = 0.0
    dt_max: float = math.inf
    snapshot_first: float = 1e-2
    snapshot_ratio: float = 10.0 ** 0.125  # 8 snapshots per decade of t
    snapshot_times: tuple | None = None    # explicit override
    eps_pos_factor: float = EPS_POS_FACTOR
    max_steps: int = 500_000_000

    def __post_init__(self):
        if not (0.0 < self.safety < 1.0):
            raise ValidationError(f"safety must be in (0,1) (got {self.safety})")
        if not (self.t_end > 0.0):
            raise ValidationError("t_end must be positive")
        if self.snapshot_ratio <= 1.0:
            raise ValidationError("snapshot_ratio must exceed 1")

    def to_json(self) -> dict:
        out = {
            "t_end": self.t_end, "safety": self.safety, "dt_min": self.dt_min,
            "dt_max": None if math.isinf(self.dt_max) else self.dt_max,
            "snapshot_first": self.snapshot_first,
            "snapshot_ratio": self.snapshot_ratio,
            "eps_pos_factor": self.eps_pos_factor,
            "max_steps": self.max_steps,
        }
        if self.snapshot_times is not None:
            out["snapshot_times"] = list(self.snapshot_times)
        return out

    @staticmethod
    def from_json(obj: dict) -> "StepControl":
        kw = dict(obj)
        if kw.get("dt_max") is None:
            kw["dt_max"] = math.inf
        if "snapshot_times" in kw and kw["snapshot_times"] is not None:
            kw["snapshot_times"] = tuple(float(t) for t in kw["snapshot_times"])
        return StepControl(**kw)


@dataclass
class Trajectory:
    """Snapshots plus per-snapshot scalar series of one run.

    snapshots hold the raw evolved state: u for original/hj-only/plap-only,
    v for rescaled mode (use unrescale_field to return to u).
    """

    mode: str
    params: Params
    grid: Grid
    eps_pos: float
    t_start: float
    times: np.ndarray
    taus: np.ndarray
    l1: np.ndarray
    linf: np.ndarray
    lipschitz: np.ndarray
    support_radius: np.ndarray
    dt_last: np.ndarray
    clamp_count: np.ndarray  # cumulative clamped-cell events up to each time
    snapshots: list = dc_field(repr=False, default_factory=list)
    status: str = "ok"
    aborted: bool = False
    config_hash: str | None = None

    def mask(self, index: int, eps: float | None = None) -> PositivitySet:
        e = self.eps_pos if eps is None else eps
        return positivity_set(self.snapshots[index], e)

    def final_mask(self, eps: float | None = None) -> PositivitySet:
        return self.mask(len(self.snapshots) - 1, eps)

    def series_rows(self):
        for k in range(len(self.times)):
            yield (self.times[k], self.taus[k], self.l1[k], self.linf[k],
                   self.lipschitz[k], self.support_radius[k], self.dt_last[k],
                   int(self.clamp_count[k]))


def time_map(t: float, q: float) -> float:
    """Logarithmic time tau = ln(1 + (q-1) t)/(q-1)."""
    if t < 0.0:
        raise ValidationError("t must be >= 0")
    if not q > 1.0:
        raise ValidationError("q must be > 1")
    return math.log1p((q - 1.0) * t) / (q - 1.0)


def time_map_inverse(tau: float, q: float) -> float:
    if not q > 1.0:
        raise ValidationError("q must be > 1")
    return math.expm1((q - 1.0) * tau) / (q - 1.0)


def _scale(t: float, q: float) -> float:
    return (1.0 + (q - 1.0) * t) ** (1.0 / (q - 1.0))


def rescale_field(u: Field, t: float, q: float) -> Field:
    """v = (1 + (q-1) t)^(1/(q-1)) u, freezing the expected decay."""
    if t < 0.0:
        raise ValidationError("t must be >= 0")
    return Field(u.grid, u.values * _scale(t, q))


def unrescale_field(v: Field, t: float, q: float) -> Field:
    if t < 0.0:
        raise ValidationError("t must be >= 0")
    return Field(v.grid, v.values / _scale(t, q))


def _checked_update(f: Field, dt: float, rhs: np.ndarray, sup0: float) -> tuple[Field, int]:
    raw = f.values + dt * rhs
    if not np.isfinite(raw).all():
        raise NumericalAbort("non-finite value produced by explicit step", reason="nan")
    m = float(raw.min())
    if m < 0.0:
        if m < -NEG_ABORT_FACTOR * max(sup0, 1e-300):
            raise NumericalAbort(
                f"negative value {m:.3e} exceeds round-off tolerance "
                "(time step too large for stability)", reason="negative")
        clamps = int(np.count_nonzero(raw < 0.0))
        raw = np.maximum(raw, 0.0)
    else:
        clamps = 0
    return Field(f.grid, raw), clamps


def _require_cfl(dt: float, f: Field, out) -> None:
    # monotonicity of the explicit update needs the combined bound <= 1
    dx = f.grid.dx
    load = dt * (2.0 * f.grid.dim * out.max_diff / (dx * dx) + out.max_wave / dx)
    if load > 1.0 + 1e-12:
        raise ValidationError(
            f"dt={dt:.3e} violates the explicit stability bound (load {load:.3f} > 1)")


def step_original(f: Field, dt: float, params: Params) -> tuple[Field, int]:
    """One forward-Euler step of the full flow; returns (field, clamped cells).

    Raises ValidationError when dt breaks the stability bound and
    NumericalAbort on non-finite or significantly negative results.
    """
    if dt < 0.0:
        raise ValidationError("dt must be >= 0")
    out = apply_stencil(f, params.p, params.q)
    _require_cfl(dt, f, out)
    return _checked_update(f, dt, out.plap - out.ham, float(f.values.max(initial=0.0)))


def step_rescaled(v: Field, tau: float, dtau: float, params: Params) -> tuple[Field, int]:
    """One forward-Euler step of the decay-normalized flow at time tau."""
    if dtau < 0.0:
        raise ValidationError("dtau must be >= 0")
    if not params.q < params.p - 1.0:
        raise ValidationError(
            f"rescaled flow requires q < p-1 (got p={params.p}, q={params.q})")
    out = apply_stencil(v, params.p, params.q)
    pref = math.exp(-(params.p - 1.0 - params.q) * tau)
    scaled = replace(out, max_diff=pref * out.max_diff)
    _require_cfl(dtau, v, scaled)
    rhs = pref * out.plap - out.ham + v.values
    return _checked_update(v, dtau, rhs, float(v.values.max(initial=0.0)))


def geometric_times(first: float, t_end: float, ratio: float) -> list:
    """first * ratio^k up to and including t_end."""
    if not (first > 0.0 and t_end > 0.0 and ratio > 1.0):
        raise ValidationError("need first > 0, t_end > 0, ratio > 1")
    out = []
    k = 0
    while True:
        t = first * ratio**k
        if t > t_end * (1.0 + 1e-9):
            break
        out.append(min(t, t_end))
        k += 1
    if not out or out[-1] < t_end * (1.0 - 1e-12):
        out.append(t_end)
    return out


_MODE_FLAGS = {
    # diff_on, abs_on, react_on, rescaled
    "original": (1.0, 1.0, 0.0, False),
    "hj-only": (0.0, 1.0, 0.0, False),
    "plap-only": (1.0, 0.0, 0.0, False),
    "rescaled": (1.0, 1.0, 1.0, True),
}


def run(params: Params, grid: Grid, initial: Field, mode: str,
        control: StepControl, t_start: float = 0.0,
        config_hash: str | None = None) -> Trajectory:
    """Integrate from t_start and record snapshots on the requested schedule.

    `initial` is always the physical state u(t_start); rescaled mode applies
    the decay normalization internally (and its snapshots hold v).
    Deterministic for fixed inputs. On a numerical abort the trajectory is
    returned with aborted=True and everything recorded so far retained.
    """
    if mode not in MODES:
        raise ValidationError(f"unknown mode {mode!r} (expected one of {MODES})")
    if grid.dim != params.dim:
        raise ValidationError("grid dimension does not match params.dim")
    if initial.grid != grid:
        raise ValidationError("initial field lives on a different grid")
    if t_start < 0.0:
        raise ValidationError("t_start must be >= 0")
    if control.t_end <= t_start:
        raise ValidationError("t_end must exceed t_start")
    if mode == "rescaled" and not params.q < params.p - 1.0:
        raise ValidationError(
            f"rescaled mode requires q in (1, p-1): the diffusivity prefactor "
            f"exp(-(p-1-q) tau) must decay (got p={params.p}, q={params.q})")

    diff_on, abs_on, react_on, rescaled = _MODE_FLAGS[mode]
    rate = params.p - 1.0 - params.q if rescaled else 0.0

    sup0 = float(initial.values.max(initial=0.0))
    eps_pos = control.eps_pos_factor * sup0
    neg_abort = NEG_ABORT_FACTOR * sup0

    if rescaled:
        state = rescale_field(initial, t_start, params.q).values.copy()
        clock = time_map(t_start, params.q)
    else:
        state = initial.values.copy()
        clock = t_start

    if control.snapshot_times is not None:
        targets = [float(t) for t in control.snapshot_times]
    else:
        targets = geometric_times(control.snapshot_first, control.t_end,
                                  control.snapshot_ratio)
    targets = [t for t in targets if t > t_start]
    if not targets or targets[-1] < control.t_end * (1.0 - 1e-12):
        targets.append(control.t_end)
    if any(b <= a for a, b in zip(targets, targets[1:])):
        raise ValidationError("snapshot times must be strictly increasing")

    ws = (np.empty_like(state), np.empty_like(state), np.empty_like(state))

    times = [t_start]
    dts = [0.0]
    clamps = [0]
    snapshots = [Field(grid, state.copy())]
    status = "ok"
    total_clamps = 0

    def _boundary_clear(arr) -> bool:
        if arr.ndim == 1:
            return not (arr[0] > eps_pos or arr[-1] > eps_pos)
        return not (arr[0, :].max() > eps_pos or arr[-1, :].max() > eps_pos
                    or arr[:, 0].max() > eps_pos or arr[:, -1].max() > eps_pos)

    if not _boundary_clear(state):
        raise ValidationError(
            "initial data reaches the boundary ring; enlarge the domain "
            "(compact support with a clear margin is assumed)")

    for t_target in targets:
        seg_target = time_map(t_target, params.q) if rescaled else t_target
        clock, dt_last, seg_clamps, code = backend.advance(
            state, clock, seg_target,
            dx=grid.dx, p=params.p, q=params.q,
            diff_on=diff_on, abs_on=abs_on, react_on=react_on,
            rescaled=rescaled, rate=rate,
            safety=control.safety, dt_min=control.dt_min, dt_max=control.dt_max,
            eps_pos=eps_pos, neg_abort=neg_abort, max_steps=control.max_steps,
            workspaces=ws)
        total_clamps += seg_clamps
        t_now = time_map_inverse(clock, params.q) if rescaled else clock
        if t_now > times[-1]:  # nan/negative aborts leave the clock untouched
            times.append(t_now)
            dts.append(dt_last)
            clamps.append(total_clamps)
            snapshots.append(Field(grid, state.copy()))
        if code != backend.STATUS_OK:
            status = _STATUS_NAMES.get(code, f"status-{code}")
            break

    n = len(times)
    traj = Trajectory(
        mode=mode, params=params, grid=grid, eps_pos=eps_pos, t_start=t_start,
        times=np.array(times), taus=np.array([time_map(t, params.q) for t in times]),
        l1=np.empty(n), linf=np.empty(n), lipschitz=np.empty(n),
        support_radius=np.empty(n), dt_last=np.array(dts),
        clamp_count=np.array(clamps, dtype=np.int64), snapshots=snapshots,
        status=status, aborted=status != "ok", config_hash=config_hash,
    )
    for k, snap in enumerate(snapshots):
        nm = norms(snap)
        traj.l1[k] = nm.l1
        traj.linf[k] = nm.linf
        traj.lipschitz[k] = nm.lipschitz
        traj.support_radius[k] = positivity_set(snap, eps_pos).support_radius
    return traj
