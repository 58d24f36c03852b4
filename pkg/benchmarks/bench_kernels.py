"""Numba vs numpy kernels: one red-black SOR sweep on a 513^2 stencil, bilinear
lookup of 1e5 points, and a full solve at a moderate grid.

    python3 benchmarks/bench_kernels.py [--grid 513] [--repeat 5]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from nkcross import _kernels
from nkcross.extremal import _build_stencil, h_grid_solve
from nkcross.geometry import unit_interval_pair


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=int, default=513)
    ap.add_argument("--points", type=int, default=100_000)
    ap.add_argument("--solve-grid", type=int, default=129)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    pair = unit_interval_pair()
    st, bbox = _build_stencil(pair, args.grid, args.grid, True)
    rng = np.random.default_rng(0)
    xs = rng.uniform(-0.99, 0.99, args.points)
    ys = rng.uniform(-0.99, 0.99, args.points)
    hx = (bbox[1] - bbox[0]) / (args.grid - 1)
    hy = (bbox[3] - bbox[2]) / (args.grid - 1)

    backends = [_kernels.numpy_backend] + ([_kernels.numba_backend] if _kernels.numba_backend else [])
    rows = []
    for kern in backends:
        u = st.init.ravel().copy()
        # warm-up triggers JIT compilation outside the timing
        kern.sor_color(u, st.idx[0], st.nbr[0], st.coef[0], st.rhs[0], 1.9)
        values = u.reshape(st.shape)
        kern.bilinear(values, bbox[0], bbox[2], hx, hy, xs[:10], ys[:10])

        def sweep():
            for c in (0, 1):
                kern.sor_color(u, st.idx[c], st.nbr[c], st.coef[c], st.rhs[c], 1.9)

        t_sweep = best_of(sweep, args.repeat)
        t_bil = best_of(lambda: kern.bilinear(values, bbox[0], bbox[2], hx, hy, xs, ys), args.repeat)
        t0 = time.perf_counter()
        f = h_grid_solve(pair, args.solve_grid, args.solve_grid, 1e-10, backend=kern.name)
        t_solve = time.perf_counter() - t0
        rows.append((kern.name, t_sweep, t_bil, t_solve, f.sweeps))

    print(f"{'backend':8s} {'sweep ' + str(args.grid) + '^2':>14s} {'bilinear ' + str(args.points):>16s} "
          f"{'solve ' + str(args.solve_grid) + '^2':>14s}")
    for name, a, b, c, n in rows:
        print(f"{name:8s} {a * 1e3:11.2f} ms {b * 1e3:13.2f} ms {c:11.2f} s  ({n} sweeps)")
    if len(rows) == 2:
        print(f"speed-up  {rows[0][1] / rows[1][1]:11.1f} x {rows[0][2] / rows[1][2]:13.1f} x "
              f"{rows[0][3] / rows[1][3]:11.1f} x")


if __name__ == "__main__":
    main()
