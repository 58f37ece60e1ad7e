"""Time the numba and numpy kernel paths side by side.

    python benchmarks/bench_kernels.py [--n 6525] [--repeat 3]

The default size matches a 725-LPR dataset at k=6 (9 tetrapeptides each).
Each path is warmed up once before timing so JIT compilation is excluded.
"""

import argparse
import time

import numpy as np

from linker_scout import _accel
from linker_scout.clustering import hac_ward
from linker_scout.invariants import invariant_matrix


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return min(times), result


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=6525, help="number of fragments")
    ap.add_argument("--dims", type=int, default=10, help="retained components fed to Ward")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    verts = rng.normal(scale=4.0, size=(args.n, 4, 3))
    points = rng.normal(size=(args.n, args.dims))

    paths = [False] + ([True] if _accel.HAVE_NUMBA else [])
    if not _accel.HAVE_NUMBA:
        print("numba not installed; timing the numpy path only")

    rows, outputs = [], {}
    for use in paths:
        invariant_matrix(verts[:2], use_numba=use)
        hac_ward(points[:3], use_numba=use)
        t_inv, inv = best_of(lambda: invariant_matrix(verts, use_numba=use), args.repeat)
        t_ward, tree = best_of(lambda: hac_ward(points, use_numba=use), args.repeat)
        name = "numba" if use else "numpy"
        outputs[name] = (inv, tree.merges)
        rows.append((name, t_inv, t_ward))

    print(f"n={args.n}  dims={args.dims}  best of {args.repeat}")
    print(f"{'path':<8}{'invariants (s)':>16}{'ward HAC (s)':>16}")
    for name, t_inv, t_ward in rows:
        print(f"{name:<8}{t_inv:>16.4f}{t_ward:>16.3f}")
    if len(rows) == 2:
        (_, ni, nw), (_, ji, jw) = rows
        print(f"{'speedup':<8}{ni / ji:>15.1f}x{nw / jw:>15.1f}x")
        (inv_np, m_np), (inv_jit, m_jit) = outputs["numpy"], outputs["numba"]
        same_tree = np.array_equal(m_np, m_jit)
        max_dev = float(np.abs(inv_np - inv_jit).max())
        print(f"merge tables identical: {same_tree}; max invariant deviation: {max_dev:.2e}")


if __name__ == "__main__":
    main()
