"""Discrete spatial operators on fields.

Conservative axis-split flux form of the degenerate diffusion
div(|grad u|^(p-2) grad u), and a monotone (Godunov/upwind) numerical
Hamiltonian for the absorption term |grad u|^q. One layer of zero ghost
cells: fields are compactly supported away from the boundary by contract.

The axis-split 2D diffusion applies the 1D face flux per axis. It is
conservative and monotone; its anisotropy error vanishes under refinement
for the qualitative behaviour studied here. The per-axis Godunov selections
are combined as a Euclidean norm before raising to the power q, which keeps
the scheme monotone and reduces exactly to the scalar Godunov flux in 1D.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import ValidationError
from .grid import Field
from .params import Params

__all__ = [
    "StencilOutput", "apply_stencil", "p_laplacian", "godunov_hamiltonian",
    "rhs_original", "rhs_rescaled", "cfl_dt",
]


@dataclass(frozen=True)
class StencilOutput:
    """Per-cell operator values plus the two stability reductions.

    plap:     discrete div(|grad u|^(p-2) grad u)
    ham:      discrete |grad u|^q (Godunov-selected, >= 0)
    max_diff: max over faces of the effective diffusivity (p-1)|D|^(p-2)
    max_wave: max over cells of the absorption wave speed q|g|^(q-1)
    """

    plap: np.ndarray
    ham: np.ndarray
    max_diff: float
    max_wave: float


def apply_stencil(f: Field, p: float, q: float) -> StencilOutput:
    if not p > 2.0:
        raise ValidationError(f"p must be > 2 (got {p})")
    if not q > 1.0:
        raise ValidationError(f"q must be > 1 (got {q})")
    plap, ham, max_d, max_g2 = backend.stencil(f.values, f.grid.dx, p, q)
    max_diff = (p - 1.0) * max_d ** (p - 2.0)
    max_wave = q * max_g2 ** (0.5 * (q - 1.0))
    return StencilOutput(plap=plap, ham=ham, max_diff=max_diff, max_wave=max_wave)


def p_laplacian(f: Field, p: float) -> np.ndarray:
    """Degenerate diffusion operator alone. No regularization is needed:
    p > 2 makes the face flux |D|^(p-2) D continuous at D = 0."""
    return apply_stencil(f, p, 2.0).plap


def godunov_hamiltonian(f: Field, q: float) -> np.ndarray:
    """Monotone numerical |grad u|^q (always >= 0)."""
    return apply_stencil(f, 3.0, q).ham


def rhs_original(f: Field, params: Params) -> tuple[np.ndarray, StencilOutput]:
    """Right-hand side of du/dt = plap - ham."""
    if params.dim != f.grid.dim:
        raise ValidationError("params.dim does not match the grid")
    out = apply_stencil(f, params.p, params.q)
    return out.plap - out.ham, out


def rhs_rescaled(f: Field, tau: float, params: Params) -> tuple[np.ndarray, StencilOutput]:
    """Right-hand side of the renormalized flow
    dv/dtau = exp(-(p-1-q) tau) * plap - ham + v,
    valid only while the diffusivity prefactor decays (q < p - 1)."""
    if params.dim != f.grid.dim:
        raise ValidationError("params.dim does not match the grid")
    if not params.q < params.p - 1.0:
        raise ValidationError(
            f"rescaled flow requires q < p-1 so the diffusivity prefactor decays "
            f"(got p={params.p}, q={params.q})")
    out = apply_stencil(f, params.p, params.q)
    pref = np.exp(-(params.p - 1.0 - params.q) * tau)
    return pref * out.plap - out.ham + f.values, out


def cfl_dt(grid_dim: int, dx: float, max_diff: float, max_wave: float,
           safety: float = 1.0) -> float:
    """Largest admissible explicit step for the given stencil reductions."""
    return safety * min(
        dx * dx / (2.0 * grid_dim * max_diff + backend.TINY),
        dx / (max_wave + backend.TINY),
    )
