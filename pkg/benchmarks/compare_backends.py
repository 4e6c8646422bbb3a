#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the three hot paths (ensemble build, routing, belief folds) on the
bundled datasets and prints one table.  The numba pass runs once untimed to
exclude JIT compilation.

Usage:  python benchmarks/compare_backends.py [--trees N] [--repeats R]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from rdtcombine import backend, belief
from rdtcombine.data import load_bundled
from rdtcombine.forest import build_ensemble, route_all


def best_of(repeats, fn):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trees", type=int, default=100)
    parser.add_argument("--min-leaf", type=int, default=2)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    backends = ["numpy"]
    if backend.HAS_NUMBA:
        backends.insert(0, "numba")
    else:
        print("numba not importable; benchmarking the fallback only")

    rows = []
    for name in ("tic_tac_toe", "breast_cancer"):
        ds = load_bundled(name)
        for b in backends:
            build = lambda: build_ensemble(ds, args.trees, args.min_leaf, seed=7, backend=b)
            if b == "numba":
                build()  # warm the JIT cache before timing
            t_build = best_of(args.repeats, build)
            model = build()
            t_route = best_of(args.repeats, lambda: route_all(model, ds.X, backend=b))
            counts = route_all(model, ds.X, backend=b)
            # per-leaf masses via the shared table, then the fold kernels alone
            flat = counts.reshape(-1, 2)
            pairs, inv = np.unique(flat, axis=0, return_inverse=True)
            gathered = np.ascontiguousarray(
                belief.mass_table(pairs[:, 0], pairs[:, 1])[inv.reshape(counts.shape[:2])]
            )
            kern = backend.kernels(b)
            kern.dempster_fold(gathered[:2])  # warm
            t_fold = best_of(
                args.repeats,
                lambda: (kern.dempster_fold(gathered), kern.cautious_fold(gathered)),
            )
            rows.append((name, b, t_build, t_route, t_fold))

    print(f"\n{args.trees} trees, min_leaf={args.min_leaf}, best of {args.repeats}")
    print(f"{'dataset':<15} {'backend':<8} {'build':>10} {'route':>10} {'folds':>10}")
    for name, b, t_build, t_route, t_fold in rows:
        print(f"{name:<15} {b:<8} {t_build:>9.3f}s {t_route:>9.3f}s {t_fold:>9.3f}s")

    if len(backends) == 2:
        print(f"\n{'dataset':<15} {'speedup':<8} {'build':>10} {'route':>10} {'folds':>10}")
        for i in range(0, len(rows), 2):
            nb, np_ = rows[i], rows[i + 1]
            print(
                f"{nb[0]:<15} {'x':<8} {np_[2] / nb[2]:>9.1f}x {np_[3] / nb[3]:>9.1f}x "
                f"{np_[4] / nb[4]:>9.1f}x"
            )

    # the two backends must agree on what they compute
    ds = load_bundled("tic_tac_toe")
    a = build_ensemble(ds, 5, 2, seed=1, backend=backends[0])
    b_ = build_ensemble(ds, 5, 2, seed=1, backend=backends[-1])
    assert np.array_equal(a.node_pos, b_.node_pos)
    print("\nbackend outputs verified identical")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
