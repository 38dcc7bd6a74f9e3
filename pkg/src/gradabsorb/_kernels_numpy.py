"""Vectorized numpy twins of _kernels_loop.

Operation order inside every expression mirrors the scalar loops, so the two
backends agree bit for bit whenever the exponents hit the multiply/sqrt fast
paths (p in {3, 4}, q in {1, 1.5, 2}); general exponents go through pow,
where numpy's ufunc and libm may differ in the last ulp. Reductions are
order-insensitive (max / elementwise), so time-step sequences always match.
Selected via GRADABSORB_BACKEND=numpy.
"""

import math

import numpy as np

from ._kernels_loop import (
    EDT_INF, STATUS_BOUNDARY, STATUS_NAN, STATUS_NEGATIVE, STATUS_OK,
    STATUS_STALLED, TINY,
)


def _godunov_g2(a, b):
    a2 = a * a
    b2 = b * b
    rare = np.where(a > 0.0, a2, np.where(b < 0.0, b2, 0.0))
    return np.where(a > b, np.maximum(a2, b2), rare)


def _flux_of(d, ad, pm2):
    # mirror of _kernels_loop.flux_of (bit-identical on the fast paths)
    if pm2 == 1.0:
        return ad * d
    if pm2 == 2.0:
        return ad * ad * d
    return ad**pm2 * d


def _ham_of(g2, qh):
    # mirror of _kernels_loop.ham_of
    if qh == 0.75:
        return np.sqrt(g2 * np.sqrt(g2))
    if qh == 1.0:
        return g2.copy()
    if qh == 0.5:
        return np.sqrt(g2)
    return g2**qh


def stencil_1d(u, dx, p, q, plap, ham):
    n = u.shape[0]
    inv = 1.0 / dx
    d = np.empty(n + 1)
    d[0] = u[0] * inv
    if n > 1:
        d[1:n] = (u[1:] - u[:-1]) * inv
    d[n] = -u[n - 1] * inv
    ad = np.abs(d)
    f = _flux_of(d, ad, p - 2.0)
    plap[:] = (f[1:] - f[:-1]) * inv
    g2 = _godunov_g2(d[:-1], d[1:])
    ham[:] = _ham_of(g2, 0.5 * q)
    return float(ad.max()), float(g2.max())


def stencil_2d(u, dx, p, q, plap, ham):
    n0, n1 = u.shape
    inv = 1.0 / dx
    pm2 = p - 2.0
    padx = np.zeros((n0 + 2, n1))
    padx[1:-1] = u
    pady = np.zeros((n0, n1 + 2))
    pady[:, 1:-1] = u
    axd = (u - padx[:-2]) * inv
    bxd = (padx[2:] - u) * inv
    ayd = (u - pady[:, :-2]) * inv
    byd = (pady[:, 2:] - u) * inv
    fax = _flux_of(axd, np.abs(axd), pm2)
    fbx = _flux_of(bxd, np.abs(bxd), pm2)
    fay = _flux_of(ayd, np.abs(ayd), pm2)
    fby = _flux_of(byd, np.abs(byd), pm2)
    plap[:] = (fbx - fax) * inv + (fby - fay) * inv
    g2 = _godunov_g2(axd, bxd) + _godunov_g2(ayd, byd)
    ham[:] = _ham_of(g2, 0.5 * q)
    max_d = max(float(np.abs(axd).max()), float(np.abs(bxd).max()),
                float(np.abs(ayd).max()), float(np.abs(byd).max()))
    return max_d, float(g2.max())


def _advance(stencil, dim, u, t, t_target, dx, p, q, diff_on, abs_on,
             react_on, rescaled, rate, safety, dt_min, dt_max, eps_pos,
             neg_abort, max_steps, plap, ham, work):
    steps = 0
    clamps = 0
    dt_last = 0.0
    status = STATUS_OK
    while t < t_target:
        if steps >= max_steps:
            status = STATUS_STALLED
            break
        max_d, max_g2 = stencil(u, dx, p, q, plap, ham)
        dcoef = diff_on
        if rescaled:
            dcoef = diff_on * math.exp(-rate * t)
        maxdiff = (p - 1.0) * max_d ** (p - 2.0) * dcoef
        maxwave = q * max_g2 ** (0.5 * (q - 1.0)) * abs_on
        dt = safety * min(dx * dx / (2.0 * dim * maxdiff + TINY), dx / (maxwave + TINY))
        if dt < dt_min:
            dt = dt_min
        if dt > dt_max:
            dt = dt_max
        rem = t_target - t
        hit = dt >= rem
        if hit:
            dt = rem
        np.multiply(plap, dcoef, out=work)
        work -= abs_on * ham
        work += react_on * u
        work *= dt
        work += u
        if not np.isfinite(work).all():
            status = STATUS_NAN
            break
        wmin = float(work.min())
        if wmin < 0.0:
            if wmin < -neg_abort:
                status = STATUS_NEGATIVE
                break
            clamps += int(np.count_nonzero(work < 0.0))
            np.maximum(work, 0.0, out=work)
        u[...] = work
        t = t_target if hit else t + dt
        dt_last = dt
        steps += 1
        if dim == 1:
            touched = u[0] > eps_pos or u[-1] > eps_pos
        else:
            touched = bool(u[0, :].max() > eps_pos or u[-1, :].max() > eps_pos
                           or u[:, 0].max() > eps_pos or u[:, -1].max() > eps_pos)
        if touched:
            status = STATUS_BOUNDARY
            break
    return t, dt_last, clamps, status


def advance_1d(u, t, t_target, dx, p, q, diff_on, abs_on, react_on,
               rescaled, rate, safety, dt_min, dt_max, eps_pos, neg_abort,
               max_steps, plap, ham, work):
    return _advance(stencil_1d, 1, u, t, t_target, dx, p, q, diff_on, abs_on,
                    react_on, rescaled, rate, safety, dt_min, dt_max, eps_pos,
                    neg_abort, max_steps, plap, ham, work)


def advance_2d(u, t, t_target, dx, p, q, diff_on, abs_on, react_on,
               rescaled, rate, safety, dt_min, dt_max, eps_pos, neg_abort,
               max_steps, plap, ham, work):
    return _advance(stencil_2d, 2, u, t, t_target, dx, p, q, diff_on, abs_on,
                    react_on, rescaled, rate, safety, dt_min, dt_max, eps_pos,
                    neg_abort, max_steps, plap, ham, work)


def _nearest_zero_linear(mask):
    """Per-column linear distance to the nearest zero along axis 0, plus the
    index of that zero (ties to the lower index, matching the loop sweeps)."""
    n0 = mask.shape[0]
    idx = np.arange(n0, dtype=np.float64).reshape((n0,) + (1,) * (mask.ndim - 1))
    seed_above = np.where(mask == 0, idx, -np.inf)
    np.maximum.accumulate(seed_above, axis=0, out=seed_above)
    down = idx - seed_above  # inf where no zero above
    seed_below = np.where(mask == 0, idx, np.inf)
    seed_below = np.flip(np.minimum.accumulate(np.flip(seed_below, 0), axis=0), 0)
    up = seed_below - idx
    src = np.where(up < down, seed_below, seed_above)
    out = np.minimum(down, up)
    src = np.where(np.isfinite(src), src, -1.0)
    return np.where(np.isfinite(out), out, EDT_INF), src.astype(np.int64)


def edt_linear_1d(mask, out, seed):
    lin, src = _nearest_zero_linear(mask)
    out[:] = lin
    seed[:] = src
    return out


def edt_sq_2d(mask, sq, seedi, seedj, col_seed, f, row, arg, v, z):
    """Same contract as the loop version; the envelope pass is replaced by an
    exact per-row broadcast minimum (identical integer-valued distances;
    nearest-seed tie-breaking may differ, distances never do)."""
    n1 = mask.shape[1]
    lin, src = _nearest_zero_linear(mask)
    col_seed[...] = src
    col_sq = lin * lin
    j = np.arange(n1, dtype=np.float64)
    sep = j[:, None] - j[None, :]
    sep *= sep
    cols = np.arange(n1, dtype=np.int64)
    for i in range(mask.shape[0]):
        vals = sep + col_sq[i][None, :]
        ks = vals.argmin(axis=1)
        sq[i, :] = vals[cols, ks]
        seedj[i, :] = ks
        seedi[i, :] = col_seed[i, ks]
    return sq
