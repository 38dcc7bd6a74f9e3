"""Kernel backend selection: numba-compiled scalar loops or pure numpy.

GRADABSORB_BACKEND=numpy forces the vectorized fallback; anything else (or
unset) uses numba when importable. The two backends are tested to produce
identical bits, so the flag trades compile latency for throughput and never
changes results; run configuration proper stays in config files.
"""

from __future__ import annotations

import os
import types

import numpy as np

from . import _kernels_loop as _loop
from . import _kernels_numpy as _numpy
from ._kernels_loop import (  # re-exported status codes
    STATUS_BOUNDARY, STATUS_NAN, STATUS_NEGATIVE, STATUS_OK, STATUS_STALLED,
    TINY,
)
from .errors import ValidationError

__all__ = [
    "backend_name", "get_backend", "kernels",
    "stencil", "advance", "edt_sq",
    "STATUS_OK", "STATUS_NAN", "STATUS_NEGATIVE", "STATUS_BOUNDARY",
    "STATUS_STALLED", "TINY",
]

_numba_ns = None


def _build_numba_namespace():
    """Compile the scalar loops once and memoize the namespace."""
    global _numba_ns
    if _numba_ns is not None:
        return _numba_ns
    from numba import njit  # noqa: deferred so the numpy path never imports it

    jit = lambda fn: njit(cache=True)(fn)
    ns = types.SimpleNamespace()
    # Rebind callees inside the loop module so jitted drivers dispatch to
    # jitted stencils.
    _loop.flux_of = jit(_loop.flux_of)
    _loop.ham_of = jit(_loop.ham_of)
    _loop.stencil_1d = ns.stencil_1d = jit(_loop.stencil_1d)
    _loop.stencil_2d = ns.stencil_2d = jit(_loop.stencil_2d)
    _loop.edt_envelope_row = jit(_loop.edt_envelope_row)
    ns.advance_1d = jit(_loop.advance_1d)
    ns.advance_2d = jit(_loop.advance_2d)
    ns.edt_linear_1d = jit(_loop.edt_linear_1d)
    ns.edt_sq_2d = jit(_loop.edt_sq_2d)
    ns.name = "numba"
    _numba_ns = ns
    return ns


def _build_numpy_namespace():
    ns = types.SimpleNamespace(
        stencil_1d=_numpy.stencil_1d,
        stencil_2d=_numpy.stencil_2d,
        advance_1d=_numpy.advance_1d,
        advance_2d=_numpy.advance_2d,
        edt_linear_1d=_numpy.edt_linear_1d,
        edt_sq_2d=_numpy.edt_sq_2d,
        name="numpy",
    )
    return ns


def get_backend(name: str):
    """Explicit backend access (used by the cross-check tests and the bench)."""
    if name == "numpy":
        return _build_numpy_namespace()
    if name == "numba":
        return _build_numba_namespace()
    raise ValidationError(f"unknown backend {name!r} (expected 'numba' or 'numpy')")


def _select_default():
    requested = os.environ.get("GRADABSORB_BACKEND", "").strip().lower()
    if requested == "numpy":
        return _build_numpy_namespace()
    if requested in ("", "numba"):
        try:
            return _build_numba_namespace()
        except ImportError:
            if requested == "numba":
                raise ValidationError("GRADABSORB_BACKEND=numba but numba is not importable")
            return _build_numpy_namespace()
    raise ValidationError(f"GRADABSORB_BACKEND={requested!r} not recognized")


kernels = _select_default()


def backend_name() -> str:
    return kernels.name


def stencil(u: np.ndarray, dx: float, p: float, q: float, plap=None, ham=None):
    """Evaluate diffusion/absorption stencils on raw values.

    Returns (plap, ham, max_face_diff, max_selected_g2).
    """
    if plap is None:
        plap = np.empty_like(u)
    if ham is None:
        ham = np.empty_like(u)
    if u.ndim == 1:
        max_d, max_g2 = kernels.stencil_1d(u, dx, p, q, plap, ham)
    else:
        max_d, max_g2 = kernels.stencil_2d(u, dx, p, q, plap, ham)
    return plap, ham, max_d, max_g2


def advance(u, t, t_target, *, dx, p, q, diff_on, abs_on, react_on, rescaled,
            rate, safety, dt_min, dt_max, eps_pos, neg_abort, max_steps,
            workspaces=None):
    """Adaptive explicit march of raw values u (in place) to t_target."""
    if workspaces is None:
        workspaces = (np.empty_like(u), np.empty_like(u), np.empty_like(u))
    plap, ham, work = workspaces
    fn = kernels.advance_1d if u.ndim == 1 else kernels.advance_2d
    return fn(u, t, t_target, dx, p, q, diff_on, abs_on, react_on,
              bool(rescaled), rate, safety, dt_min, dt_max, eps_pos,
              neg_abort, max_steps, plap, ham, work)


def edt_sq(mask: np.ndarray):
    """Exact squared Euclidean distance (index units) from each nonzero cell
    to the nearest zero cell, plus that cell's indices (stacked as the last
    axis of `seeds`). Caller guarantees at least one zero cell. Distances are
    exact integers in float64 and backend-independent; nearest-seed
    tie-breaking is deterministic per backend but may differ between them.
    """
    m = np.ascontiguousarray(mask, dtype=np.uint8)
    if m.ndim == 1:
        lin = np.empty(m.shape, dtype=np.float64)
        seed = np.empty(m.shape, dtype=np.int64)
        kernels.edt_linear_1d(m, lin, seed)
        return lin * lin, seed[..., None]
    sq = np.empty(m.shape, dtype=np.float64)
    seedi = np.empty(m.shape, dtype=np.int64)
    seedj = np.empty(m.shape, dtype=np.int64)
    col_seed = np.empty(m.shape, dtype=np.int64)
    n1 = m.shape[1]
    f = np.empty(n1, dtype=np.float64)
    row = np.empty(n1, dtype=np.float64)
    arg = np.empty(n1, dtype=np.int64)
    v = np.empty(n1, dtype=np.int64)
    z = np.empty(n1 + 1, dtype=np.float64)
    kernels.edt_sq_2d(m, sq, seedi, seedj, col_seed, f, row, arg, v, z)
    return sq, np.stack([seedi, seedj], axis=-1)
