"""Uniform Cartesian grids (1D/2D), scalar fields, norms, and positivity sets.

Cells are centered: cell i covers [-L + i*dx, -L + (i+1)*dx] with center
x_i = -L + (i + 1/2)*dx. All fields are non-negative by construction; the
time stepper is responsible for clamping round-off negatives before building
a Field.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ValidationError
from .params import DerivedConstants, Params, derive

__all__ = [
    "Grid", "Field", "PositivitySet", "Norms",
    "norms", "positivity_set", "initial_bump",
]

#: Default positivity threshold, as a fraction of the initial sup norm.
#: Far below any physically meaningful value at desk-scale step counts,
#: far above accumulated round-off.
EPS_POS_FACTOR = 1e-10

#: Default domain half-width as a multiple of the initial support radius,
#: chosen so a localized support never reaches the boundary ring.
DOMAIN_MARGIN = 4.0


@dataclass(frozen=True)
class Grid:
    """Square uniform grid on [-extent, extent]^dim with cells^dim cells."""

    dim: int
    extent: float
    cells: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValidationError(f"dim must be 1 or 2 (got {self.dim})")
        if self.cells < 8:
            raise ValidationError(f"need at least 8 cells per axis (got {self.cells})")
        if not (self.extent > 0.0):
            raise ValidationError(f"extent must be positive (got {self.extent})")

    @property
    def dx(self) -> float:
        return 2.0 * self.extent / self.cells

    @property
    def shape(self) -> tuple:
        return (self.cells,) * self.dim

    def centers(self) -> np.ndarray:
        """Cell-center coordinates along one axis."""
        return -self.extent + (np.arange(self.cells) + 0.5) * self.dx

    def coords(self) -> tuple:
        """Per-axis coordinate arrays broadcastable to `shape`."""
        c = self.centers()
        if self.dim == 1:
            return (c,)
        return (c[:, None], c[None, :])

    def radius(self) -> np.ndarray:
        """Euclidean distance of each cell center from the origin."""
        if self.dim == 1:
            return np.abs(self.centers())
        x, y = self.coords()
        return np.sqrt(x * x + y * y)

    def to_json(self) -> dict:
        return {"extent": self.extent, "cells": self.cells}


@dataclass(frozen=True)
class Field:
    """Non-negative scalar samples on a grid."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != self.grid.shape:
            raise ValidationError(f"values shape {v.shape} != grid shape {self.grid.shape}")
        if v.size and float(v.min()) < 0.0:
            raise ValidationError("field values must be non-negative")
        object.__setattr__(self, "values", v)

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())


class Norms(NamedTuple):
    l1: float
    linf: float
    lipschitz: float


def norms(f: Field) -> Norms:
    """Discrete L1, sup, and Lipschitz norms.

    l1 sums cell values times cell volume; lipschitz is the largest magnitude
    of a one-sided difference quotient between adjacent cells (per axis,
    no ghost layer, so an all-interior linear ramp reports its exact slope).
    """
    v = f.values
    dx = f.grid.dx
    l1 = float(v.sum()) * dx**f.grid.dim
    linf = float(v.max()) if v.size else 0.0
    lip = 0.0
    for axis in range(f.grid.dim):
        d = np.diff(v, axis=axis)
        if d.size:
            lip = max(lip, float(np.abs(d).max()) / dx)
    return Norms(l1=l1, linf=linf, lipschitz=lip)


@dataclass(frozen=True)
class PositivitySet:
    """Thresholded support mask: mask = (values > threshold)."""

    grid: Grid
    mask: np.ndarray = field(repr=False)
    threshold: float

    @property
    def support_radius(self) -> float:
        """Radius of the smallest origin-centered ball of whole cells
        containing every positive cell (cell outer edge, so an all-true 1D
        mask reports the domain half-width exactly). 0 for an empty mask."""
        if not self.mask.any():
            return 0.0
        r = self.grid.radius()[self.mask]
        return float(r.max()) + 0.5 * self.grid.dx

    @property
    def count(self) -> int:
        return int(self.mask.sum())

    def boundary_clear(self) -> bool:
        """True when the outermost cell ring holds no positive cell."""
        m = self.mask
        if self.grid.dim == 1:
            return not (m[0] or m[-1])
        return not (m[0, :].any() or m[-1, :].any() or m[:, 0].any() or m[:, -1].any())


def positivity_set(f: Field, eps: float) -> PositivitySet:
    """Cells strictly above eps."""
    if eps < 0.0:
        raise ValidationError("positivity threshold must be >= 0")
    return PositivitySet(grid=f.grid, mask=f.values > eps, threshold=eps)


def _dist_to_ball_complement(g: Grid, center, radius: float) -> np.ndarray:
    """Distance from each cell center to the complement of B(center, radius)."""
    if g.dim == 1:
        r = np.abs(g.centers() - center[0])
    else:
        x, y = g.coords()
        r = np.sqrt((x - center[0]) ** 2 + (y - center[1]) ** 2)
    return np.maximum(radius - r, 0.0)


def initial_bump(grid: Grid, kind: str, *, amplitude: float = 1.0,
                 radius: float = 1.0, power: float = 2.0, width: float = 0.25,
                 cap_height: float | None = None, center=None) -> Field:
    """Compactly supported, Lipschitz, non-negative initial data.

    kind "cap":       amplitude * (radius^2 - |x-c|^2)_+^power
    kind "powerdist": amplitude * dist(x, outside B(c, radius))^power,
                      optionally flattened at cap_height (the flat top keeps
                      the near-edge shape while bounding the sup norm)
    kind "plateau":   amplitude * min(1, dist(x, outside B(c, radius))/width)

    Rejects exponents that would produce non-Lipschitz data (power < 1).
    """
    if center is None:
        center = (0.0,) * grid.dim
    if len(center) != grid.dim:
        raise ValidationError(f"center must have {grid.dim} coordinates")
    if amplitude < 0.0:
        raise ValidationError("amplitude must be >= 0")
    if radius <= 0.0:
        raise ValidationError("radius must be positive")

    if kind == "cap":
        if power < 1.0:
            raise ValidationError(f"cap power must be >= 1 for Lipschitz data (got {power})")
        if grid.dim == 1:
            r2 = (grid.centers() - center[0]) ** 2
        else:
            x, y = grid.coords()
            r2 = (x - center[0]) ** 2 + (y - center[1]) ** 2
        vals = amplitude * np.maximum(radius**2 - r2, 0.0) ** power
    elif kind == "powerdist":
        if power < 1.0:
            raise ValidationError(f"powerdist power must be >= 1 for Lipschitz data (got {power})")
        d = _dist_to_ball_complement(grid, center, radius)
        vals = amplitude * d**power
        if cap_height is not None:
            if cap_height <= 0.0:
                raise ValidationError("cap_height must be positive")
            vals = np.minimum(vals, cap_height)
    elif kind == "plateau":
        if width <= 0.0:
            raise ValidationError("plateau width must be positive")
        d = _dist_to_ball_complement(grid, center, radius)
        vals = amplitude * np.minimum(d / width, 1.0)
    else:
        raise ValidationError(f"unknown initial data kind {kind!r}")
    return Field(grid, vals)


def default_grid(params: Params, support_radius: float, cells: int) -> Grid:
    """Grid sized so a localized support cannot reach the boundary ring."""
    return Grid(dim=params.dim, extent=DOMAIN_MARGIN * support_radius, cells=cells)
