"""Closed-form comparison barriers and their validity constants.

Two families:

* decaying_bump: A (1+t)^(-1/(q-1)) (R^2 - |x-c|^2)_+^(q/(q-1)), a subsolution
  of the full flow on the ball B(c, R) whenever A <= max_amplitude(R); used
  to force positivity lower bounds (once under the solution, always under).
* stationary_vertex: a0 |x - x0|^((p-q)/(p-1-q)) with the exact amplitude a0,
  a time-independent solution of -plap + ham = 0 away from its vertex; data
  below it near x0 stays below, pinning the support edge at x0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BarrierPreconditionError, ValidationError
from .grid import Field, Grid
from .params import Params, derive

__all__ = [
    "Barrier", "ComparisonReport",
    "eval_decaying_bump", "eval_stationary_vertex", "max_amplitude",
    "subsolution_margin", "check_comparison",
]

#: comparison tolerance as a fraction of the initial sup norm
COMPARISON_TOL_FACTOR = 1e-8


def max_amplitude(radius: float, params: Params, tol: float = 1e-12) -> float:
    """Largest bump amplitude that keeps the decaying bump a subsolution.

    The sufficient condition is g(A) <= 0 with

        g(A) = -1/(q-1) + (2qR/(q-1))^q A^(q-1)
               + (2q/(q-1))^q (N+p-2) A^(p-2) R^(2(p-1-q)/(q-1)+p-2)

    g is strictly increasing on A >= 0 (both A-terms carry positive powers)
    and g(0) = -1/(q-1) < 0, so bisection from an expanding bracket finds
    the root; the returned value satisfies g in [-1e-10, 0].
    """
    p, q, n = params.p, params.q, float(params.dim)
    if not (1.0 < q < p - 1.0):
        raise ValidationError(f"bump barrier needs q in (1, p-1) (got p={p}, q={q})")
    if radius <= 0.0:
        raise ValidationError("radius must be positive")

    c1 = (2.0 * q * radius / (q - 1.0)) ** q
    c2 = (2.0 * q / (q - 1.0)) ** q * (n + p - 2.0) * radius ** (
        2.0 * (p - 1.0 - q) / (q - 1.0) + p - 2.0)

    def g(a: float) -> float:
        return -1.0 / (q - 1.0) + c1 * a ** (q - 1.0) + c2 * a ** (p - 2.0)

    lo, hi = 0.0, 1.0
    while g(hi) <= 0.0:
        hi *= 2.0
        if hi > 1e30:
            raise ValidationError("amplitude bracket expansion failed")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    return lo


def eval_decaying_bump(t, x_sq_dist, amplitude: float, radius: float, q: float):
    """Bump value at time t given squared distance(s) to the bump center.

    Vanishes outside the ball; accepts scalars or arrays.
    """
    sigma = np.maximum(radius * radius - x_sq_dist, 0.0) ** (q / (q - 1.0))
    return amplitude * (1.0 + t) ** (-1.0 / (q - 1.0)) * sigma


def eval_stationary_vertex(dist, params: Params):
    """a0 * dist^((p-q)/(p-1-q)) for distance(s) to the vertex."""
    d = derive(params)
    if math.isnan(d.a0):
        raise ValidationError("stationary barrier needs q < p-1")
    return d.a0 * np.asarray(dist, dtype=float) ** d.wait_exp


@dataclass(frozen=True)
class Barrier:
    """A barrier instance placed on a grid.

    kind "decaying_bump": fields center, radius, amplitude
    kind "stationary_vertex": fields center (the vertex), radius (the
        comparison neighbourhood), amplitude ignored (always a0)
    """

    kind: str
    params: Params
    center: tuple
    radius: float
    amplitude: float = 0.0

    def __post_init__(self):
        if self.kind not in ("decaying_bump", "stationary_vertex"):
            raise ValidationError(f"unknown barrier kind {self.kind!r}")
        if self.kind == "decaying_bump":
            a_max = max_amplitude(self.radius, self.params)
            if not (0.0 <= self.amplitude <= a_max * (1.0 + 1e-9)):
                raise ValidationError(
                    f"bump amplitude {self.amplitude} outside validity range "
                    f"[0, {a_max:.6g}] for radius {self.radius}")

    def _sq_dist(self, grid: Grid):
        if grid.dim == 1:
            return (grid.centers() - self.center[0]) ** 2
        x, y = grid.coords()
        return (x - self.center[0]) ** 2 + (y - self.center[1]) ** 2

    def region(self, grid: Grid):
        """Cells where the comparison is asserted."""
        return self._sq_dist(grid) <= self.radius**2

    def on_grid(self, grid: Grid, t: float) -> np.ndarray:
        sq = self._sq_dist(grid)
        if self.kind == "decaying_bump":
            return eval_decaying_bump(t, sq, self.amplitude, self.radius,
                                      self.params.q)
        return eval_stationary_vertex(np.sqrt(sq), self.params)

    def to_json(self) -> dict:
        return {"kind": self.kind, "center": list(self.center),
                "radius": self.radius, "amplitude": self.amplitude}


def subsolution_margin(barrier: Barrier, grid: Grid, t: float,
                       edge_cells: int = 2) -> float:
    """Largest discrete residual d/dt b - (plap(b) - ham(b)) over the
    barrier's region (a true subsolution stays <= 0 up to O(dx)).

    Cells within edge_cells of the region rim or the vertex are skipped:
    finite differences degrade at the power-law kinks there.
    """
    from .operators import apply_stencil

    b = barrier.on_grid(grid, t)
    out = apply_stencil(Field(grid, b), barrier.params.p, barrier.params.q)
    if barrier.kind == "decaying_bump":
        q = barrier.params.q
        dbdt = -1.0 / (q - 1.0) / (1.0 + t) * b
    else:
        dbdt = np.zeros_like(b)
    resid = dbdt - (out.plap - out.ham)
    sq = barrier._sq_dist(grid)
    margin = edge_cells * grid.dx
    sel = sq <= (barrier.radius - margin) ** 2
    if barrier.kind == "stationary_vertex":
        sel &= sq >= margin**2
        # the stationary barrier is unbounded: keep clear of the zero ghosts
        r = grid.radius()
        sel &= r < grid.extent - 2.0 * margin
    if not sel.any():
        raise ValidationError("barrier region too small for a residual check")
    return float(resid[sel].max())


@dataclass(frozen=True)
class ComparisonReport:
    kind: str
    direction: str
    ok: bool
    worst_violation: float
    tolerance: float
    first_violation_time: float | None

    def to_json(self) -> dict:
        return {"kind": self.kind, "direction": self.direction, "ok": self.ok,
                "worst_violation": self.worst_violation,
                "tolerance": self.tolerance,
                "first_violation_time": self.first_violation_time}


def check_comparison(traj, barrier: Barrier, direction: str,
                     t_offset: float = 0.0) -> ComparisonReport:
    """Verify barrier-vs-trajectory ordering at every snapshot and cell of
    the barrier's region.

    direction "below": barrier(t) <= u(t) (positivity forcing);
    direction "above": u(t) <= barrier(t) (confinement).
    The ordering must already hold at the first snapshot; otherwise the
    setup is rejected (that is a precondition failure, not a violation).
    Violations are tolerated up to 1e-8 times the initial sup norm.

    For the stationary vertex barrier the two cells nearest the cusp are
    excluded: finite differences (and with them the discrete solution)
    degrade at the power-law vertex, where the identity only holds in the
    viscosity sense.
    """
    if direction not in ("below", "above"):
        raise ValidationError("direction must be 'below' or 'above'")
    grid = traj.grid
    region = barrier.region(grid)
    if barrier.kind == "stationary_vertex":
        region = region & (barrier._sq_dist(grid) > (2.0 * grid.dx) ** 2)
    if not region.any():
        raise ValidationError("barrier region does not intersect the grid")
    tol = COMPARISON_TOL_FACTOR * float(traj.snapshots[0].values.max(initial=0.0))

    def gap(k: int) -> float:
        b = barrier.on_grid(grid, traj.times[k] - t_offset)
        u = traj.snapshots[k].values
        d = (b - u) if direction == "below" else (u - b)
        return float(d[region].max())

    if gap(0) > tol:
        raise BarrierPreconditionError(
            f"ordering hypothesis fails at the initial snapshot by {gap(0):.3e} "
            f"(tolerance {tol:.3e}); comparison not started")

    worst = -math.inf
    first_bad = None
    for k in range(len(traj.times)):
        gk = gap(k)
        worst = max(worst, gk)
        if gk > tol and first_bad is None:
            first_bad = float(traj.times[k])
    return ComparisonReport(
        kind=barrier.kind, direction=direction, ok=first_bad is None,
        worst_violation=worst, tolerance=tol, first_violation_time=first_bad)
