#!/usr/bin/env python3
"""Throughput comparison of the numba and numpy kernel backends.

Usage: python benchmarks/bench_backends.py [--cells N] [--steps-target T]
"""

import argparse
import time

import numpy as np

from gradabsorb.backend import get_backend


def bench(fn, *args, repeat=3, warmup=True):
    if warmup:
        fn(*args)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def advance_case(kern, u0, dx, t_end):
    u = u0.copy()
    ws = (np.empty_like(u), np.empty_like(u), np.empty_like(u))
    fn = kern.advance_1d if u.ndim == 1 else kern.advance_2d
    return fn(u, 0.0, t_end, dx, 3.0, 1.5, 1.0, 1.0, 0.0, False, 0.0,
              0.4, 0.0, np.inf, 1e-10, 1e-14, 10**9, *ws)


def edt_case(kern, mask):
    sq = np.empty(mask.shape)
    n1 = mask.shape[1]
    ws = (np.empty(mask.shape, np.int64), np.empty(mask.shape, np.int64),
          np.empty(mask.shape, np.int64))
    f = np.empty(n1)
    row = np.empty(n1)
    arg = np.empty(n1, np.int64)
    v = np.empty(n1, np.int64)
    z = np.empty(n1 + 1)
    kern.edt_sq_2d(mask, sq, ws[0], ws[1], ws[2], f, row, arg, v, z)
    return sq


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cells", type=int, default=1024)
    ap.add_argument("--t-end", type=float, default=2.0)
    args = ap.parse_args()

    nb = get_backend("numba")
    npk = get_backend("numpy")

    x = np.linspace(-4, 4, args.cells, endpoint=False) + 4.0 / args.cells
    u1 = np.maximum(1 - x * x, 0.0) ** 2
    dx1 = 8.0 / args.cells

    n2 = 128
    xx = np.linspace(-4, 4, n2, endpoint=False) + 4.0 / n2
    r2 = xx[:, None] ** 2 + xx[None, :] ** 2
    u2 = np.maximum(1 - r2, 0.0) ** 2
    dx2 = 8.0 / n2

    rng = np.random.default_rng(0)
    mask = (rng.random((256, 256)) > 0.4).astype(np.uint8)
    mask[128, 128] = 0

    print(f"{'case':<28}{'numba':>12}{'numpy':>12}{'speedup':>10}")
    rows = [
        (f"advance 1D {args.cells}c to t={args.t_end}",
         lambda k: advance_case(k, u1, dx1, args.t_end)),
        (f"advance 2D {n2}^2 to t=0.5", lambda k: advance_case(k, u2, dx2, 0.5)),
        ("exact EDT 256^2", lambda k: edt_case(k, mask)),
    ]
    for name, case in rows:
        t_nb = bench(case, nb)
        t_np = bench(case, npk)
        print(f"{name:<28}{t_nb:>10.3f}s{t_np:>10.3f}s{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
