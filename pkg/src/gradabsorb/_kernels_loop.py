"""Scalar-loop kernels, written to be numba.njit-compiled.

Every function here has a vectorized twin in _kernels_numpy.py; the two are
kept operation-for-operation identical so that either backend produces the
same bits. Ghost cells hold 0 (compact support; the stepper aborts before
anything reaches the boundary ring).

Conventions
-----------
Faces: D = (u_right - u_left)/dx, zero ghosts outside the grid.
Diffusive face flux: |D|^(p-2) * D.
Per-axis monotone gradient selection for the absorption term (upwind flux
of a convex Hamiltonian), with a = backward and b = forward difference:
    a > b (shock):         g2 = max(a^2, b^2)
    a <= b (rarefaction):  g2 = a^2 if a > 0, b^2 if b < 0, else 0
Axis selections combine as g2 = sum over axes, and |grad u|^q = g2^(q/2).

Advance drivers return (t, dt_last, clamp_count, status) with status codes:
    0 ok (reached target)   1 non-finite value   2 negative beyond tolerance
    3 support touched boundary ring              4 step limit exceeded
"""

import math

TINY = 1e-30  # guards division when gradients vanish
EDT_INF = 1e18  # effectively-infinite linear distance; squares stay < 1e308

STATUS_OK = 0
STATUS_NAN = 1
STATUS_NEGATIVE = 2
STATUS_BOUNDARY = 3
STATUS_STALLED = 4


def flux_of(d, ad, pm2):
    """Diffusive face flux |d|^pm2 * d.

    Exponents 1 and 2 (p = 3, 4) go through exact multiplies so that both
    backends produce identical bits; the general path uses pow (correct to
    1 ulp, may differ across backends in the last bit).
    """
    if pm2 == 1.0:
        return ad * d
    if pm2 == 2.0:
        return ad * ad * d
    return ad ** pm2 * d


def ham_of(g2, qh):
    """|selected gradient|^q = g2^qh with exact sqrt fast paths.

    qh = q/2: 0.5 and 1.0 and 0.75 (q = 1, 2, 1.5) avoid pow entirely.
    """
    if qh == 0.75:
        return math.sqrt(g2 * math.sqrt(g2))
    if qh == 1.0:
        return g2
    if qh == 0.5:
        return math.sqrt(g2)
    return g2 ** qh


def stencil_1d(u, dx, p, q, plap, ham):
    """Fill plap/ham; return (max |face difference|, max selected g2)."""
    n = u.shape[0]
    pm2 = p - 2.0
    qh = 0.5 * q
    inv = 1.0 / dx
    max_d = 0.0
    max_g2 = 0.0
    dprev = u[0] * inv
    fprev = flux_of(dprev, abs(dprev), pm2)
    if abs(dprev) > max_d:
        max_d = abs(dprev)
    for i in range(n):
        if i + 1 < n:
            d = (u[i + 1] - u[i]) * inv
        else:
            d = -u[i] * inv
        ad = abs(d)
        if ad > max_d:
            max_d = ad
        fcur = flux_of(d, ad, pm2)
        plap[i] = (fcur - fprev) * inv
        a = dprev
        b = d
        if a > b:
            aa = a * a
            bb = b * b
            g2 = aa if aa > bb else bb
        elif a > 0.0:
            g2 = a * a
        elif b < 0.0:
            g2 = b * b
        else:
            g2 = 0.0
        ham[i] = ham_of(g2, qh)
        if g2 > max_g2:
            max_g2 = g2
        dprev = d
        fprev = fcur
    return max_d, max_g2


def stencil_2d(u, dx, p, q, plap, ham):
    """2D axis-split variant of stencil_1d (same conventions per axis)."""
    n0, n1 = u.shape
    pm2 = p - 2.0
    qh = 0.5 * q
    inv = 1.0 / dx
    max_d = 0.0
    max_g2 = 0.0
    for i in range(n0):
        for j in range(n1):
            c = u[i, j]
            um = u[i - 1, j] if i > 0 else 0.0
            up = u[i + 1, j] if i + 1 < n0 else 0.0
            vm = u[i, j - 1] if j > 0 else 0.0
            vp = u[i, j + 1] if j + 1 < n1 else 0.0
            ax = (c - um) * inv
            bx = (up - c) * inv
            ay = (c - vm) * inv
            by = (vp - c) * inv
            fax = flux_of(ax, abs(ax), pm2)
            fbx = flux_of(bx, abs(bx), pm2)
            fay = flux_of(ay, abs(ay), pm2)
            fby = flux_of(by, abs(by), pm2)
            plap[i, j] = (fbx - fax) * inv + (fby - fay) * inv
            if ax > bx:
                aa = ax * ax
                bb = bx * bx
                g2x = aa if aa > bb else bb
            elif ax > 0.0:
                g2x = ax * ax
            elif bx < 0.0:
                g2x = bx * bx
            else:
                g2x = 0.0
            if ay > by:
                aa = ay * ay
                bb = by * by
                g2y = aa if aa > bb else bb
            elif ay > 0.0:
                g2y = ay * ay
            elif by < 0.0:
                g2y = by * by
            else:
                g2y = 0.0
            g2 = g2x + g2y
            ham[i, j] = ham_of(g2, qh)
            if g2 > max_g2:
                max_g2 = g2
            if abs(ax) > max_d:
                max_d = abs(ax)
            if abs(bx) > max_d:
                max_d = abs(bx)
            if abs(ay) > max_d:
                max_d = abs(ay)
            if abs(by) > max_d:
                max_d = abs(by)
    return max_d, max_g2


def advance_1d(u, t, t_target, dx, p, q, diff_on, abs_on, react_on,
               rescaled, rate, safety, dt_min, dt_max, eps_pos, neg_abort,
               max_steps, plap, ham, work):
    """March u forward in place until t_target with adaptive explicit steps.

    dt per step: safety * min(dx^2 / (2*dim*maxdiff), dx / maxwave),
    clamped to [dt_min, dt_max] and truncated to land exactly on t_target.
    In rescaled mode the diffusivity carries the factor exp(-rate*t).
    """
    n = u.shape[0]
    steps = 0
    clamps = 0
    dt_last = 0.0
    status = STATUS_OK
    while t < t_target:
        if steps >= max_steps:
            status = STATUS_STALLED
            break
        max_d, max_g2 = stencil_1d(u, dx, p, q, plap, ham)
        dcoef = diff_on
        if rescaled:
            dcoef = diff_on * math.exp(-rate * t)
        maxdiff = (p - 1.0) * max_d ** (p - 2.0) * dcoef
        maxwave = q * max_g2 ** (0.5 * (q - 1.0)) * abs_on
        dt = safety * min(dx * dx / (2.0 * maxdiff + TINY), dx / (maxwave + TINY))
        if dt < dt_min:
            dt = dt_min
        if dt > dt_max:
            dt = dt_max
        rem = t_target - t
        hit = dt >= rem
        if hit:
            dt = rem
        bad = 0
        newclamps = 0
        for i in range(n):
            raw = u[i] + dt * (dcoef * plap[i] - abs_on * ham[i] + react_on * u[i])
            if not math.isfinite(raw):
                bad = STATUS_NAN
                break
            if raw < 0.0:
                if raw < -neg_abort:
                    bad = STATUS_NEGATIVE
                    break
                newclamps += 1
                raw = 0.0
            work[i] = raw
        if bad != 0:
            status = bad
            break
        clamps += newclamps
        for i in range(n):
            u[i] = work[i]
        t = t_target if hit else t + dt
        dt_last = dt
        steps += 1
        if u[0] > eps_pos or u[n - 1] > eps_pos:
            status = STATUS_BOUNDARY
            break
    return t, dt_last, clamps, status


def advance_2d(u, t, t_target, dx, p, q, diff_on, abs_on, react_on,
               rescaled, rate, safety, dt_min, dt_max, eps_pos, neg_abort,
               max_steps, plap, ham, work):
    n0, n1 = u.shape
    steps = 0
    clamps = 0
    dt_last = 0.0
    status = STATUS_OK
    while t < t_target:
        if steps >= max_steps:
            status = STATUS_STALLED
            break
        max_d, max_g2 = stencil_2d(u, dx, p, q, plap, ham)
        dcoef = diff_on
        if rescaled:
            dcoef = diff_on * math.exp(-rate * t)
        maxdiff = (p - 1.0) * max_d ** (p - 2.0) * dcoef
        maxwave = q * max_g2 ** (0.5 * (q - 1.0)) * abs_on
        dt = safety * min(dx * dx / (4.0 * maxdiff + TINY), dx / (maxwave + TINY))
        if dt < dt_min:
            dt = dt_min
        if dt > dt_max:
            dt = dt_max
        rem = t_target - t
        hit = dt >= rem
        if hit:
            dt = rem
        bad = 0
        newclamps = 0
        for i in range(n0):
            if bad != 0:
                break
            for j in range(n1):
                raw = u[i, j] + dt * (
                    dcoef * plap[i, j] - abs_on * ham[i, j] + react_on * u[i, j]
                )
                if not math.isfinite(raw):
                    bad = STATUS_NAN
                    break
                if raw < 0.0:
                    if raw < -neg_abort:
                        bad = STATUS_NEGATIVE
                        break
                    newclamps += 1
                    raw = 0.0
                work[i, j] = raw
        if bad != 0:
            status = bad
            break
        clamps += newclamps
        for i in range(n0):
            for j in range(n1):
                u[i, j] = work[i, j]
        t = t_target if hit else t + dt
        dt_last = dt
        steps += 1
        touched = False
        for j in range(n1):
            if u[0, j] > eps_pos or u[n0 - 1, j] > eps_pos:
                touched = True
                break
        if not touched:
            for i in range(n0):
                if u[i, 0] > eps_pos or u[i, n1 - 1] > eps_pos:
                    touched = True
                    break
        if touched:
            status = STATUS_BOUNDARY
            break
    return t, dt_last, clamps, status


def edt_linear_1d(mask, out, seed):
    """Linear (index-unit) distance from each cell to the nearest mask==0
    cell, and that cell's index (ties to the left). Two sweeps; EDT_INF and
    seed -1 where the line holds no zero cell.
    """
    n = mask.shape[0]
    cur = EDT_INF
    src = -1
    for i in range(n):
        if mask[i] == 0:
            cur = 0.0
            src = i
        elif cur < EDT_INF:
            cur = cur + 1.0
        out[i] = cur
        seed[i] = src
    cur = EDT_INF
    src = -1
    for i in range(n - 1, -1, -1):
        if mask[i] == 0:
            cur = 0.0
            src = i
        elif cur < EDT_INF:
            cur = cur + 1.0
        if cur < out[i]:
            out[i] = cur
            seed[i] = src
    return out


def edt_envelope_row(f, out, arg, v, z):
    """Exact 1D squared-distance transform out[j] = min_k (j-k)^2 + f[k],
    with the minimizing k stored in arg.

    Lower envelope of parabolas (two passes). f values are squared integers
    (or EDT_INF^2 for empty columns); outputs are exact integers in float64.
    v, z are integer/float workspaces of lengths n and n+1.
    """
    n = f.shape[0]
    k = 0
    v[0] = 0
    z[0] = -math.inf
    z[1] = math.inf
    for j in range(1, n):
        fj = f[j] + j * j
        while True:
            vk = v[k]
            s = (fj - (f[vk] + vk * vk)) / (2.0 * j - 2.0 * vk)
            if s <= z[k]:
                k -= 1
            else:
                break
        k += 1
        v[k] = j
        z[k] = s
        z[k + 1] = math.inf
    k = 0
    for j in range(n):
        while z[k + 1] < j:
            k += 1
        vk = v[k]
        out[j] = (j - vk) * (j - vk) + f[vk]
        arg[j] = vk
    return out


def edt_sq_2d(mask, sq, seedi, seedj, col_seed, f, row, arg, v, z):
    """Exact squared Euclidean distance (index units) to the nearest zero
    cell, plus that cell's (row, column) indices.

    Pass 1: per-column linear scan along axis 0 (linear distances stored in
    sq, nearest in-column row index in col_seed); pass 2: parabola envelope
    along axis 1 on the squared column distances. f, row, arg, v, z are
    workspaces of lengths n1, n1, n1, n1, n1+1.
    """
    n0, n1 = mask.shape
    for j in range(n1):
        cur = EDT_INF
        src = -1
        for i in range(n0):
            if mask[i, j] == 0:
                cur = 0.0
                src = i
            elif cur < EDT_INF:
                cur = cur + 1.0
            sq[i, j] = cur
            col_seed[i, j] = src
        cur = EDT_INF
        src = -1
        for i in range(n0 - 1, -1, -1):
            if mask[i, j] == 0:
                cur = 0.0
                src = i
            elif cur < EDT_INF:
                cur = cur + 1.0
            if cur < sq[i, j]:
                sq[i, j] = cur
                col_seed[i, j] = src
    for i in range(n0):
        for j in range(n1):
            f[j] = sq[i, j] * sq[i, j]
        edt_envelope_row(f, row, arg, v, z)
        for j in range(n1):
            sq[i, j] = row[j]
            kk = arg[j]
            seedi[i, j] = col_seed[i, kk]
            seedj[i, j] = kk
    return sq
