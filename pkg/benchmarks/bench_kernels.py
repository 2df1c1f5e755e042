#!/usr/bin/env python3
"""Benchmark the pairwise-update kernel: numba backend vs numpy fallback.

Runs the same batch of updates through both implementations on spaces of
growing size, reports wall time per update, and verifies the two backends
produce bit-identical mass vectors.

Usage: python benchmarks/bench_kernels.py [--updates N]
"""

import argparse
import time

import numpy as np

from combosearch import _kernels
from combosearch.space import Dimension, SearchSpace

SPACES = [
    ("4x3x7 (bundled)", (4, 3, 7)),
    ("10x10x10", (10, 10, 10)),
    ("24x16x12x8", (24, 16, 12, 8)),
    ("40x40x40", (40, 40, 40)),
]


def build_space(sizes):
    return SearchSpace(
        tuple(
            Dimension(f"d{i}", tuple(f"v{j}" for j in range(s)))
            for i, s in enumerate(sizes)
        )
    )


def run_batch(apply_update, u, arg, draws, pows_by_draw, once):
    start = time.perf_counter()
    for sampled, pows in zip(draws, pows_by_draw):
        apply_update(u, arg, sampled, pows, once)
        u /= u.sum()
    return time.perf_counter() - start


def bench(space, n_updates, once, rng):
    max_pairs = space.ndim * (space.ndim - 1) // 2
    draws = [
        np.asarray(space.combination_at(int(rng.integers(space.total))).indices, dtype=np.int64)
        for _ in range(n_updates)
    ]
    factors = rng.uniform(0.5, 2.0, size=n_updates)
    pows_by_draw = [f ** np.arange(max_pairs + 1, dtype=np.float64) for f in factors]
    u0 = rng.random(space.total) + 1e-9
    u0 /= u0.sum()

    u_np = u0.copy()
    t_np = run_batch(
        _kernels.apply_update_numpy, u_np, space.digits_matrix, draws, pows_by_draw, once
    )
    if not _kernels.HAVE_NUMBA:
        return t_np, None, True

    # warm the JIT outside the timed region
    _kernels.apply_update_numba(u0.copy(), space.radices, draws[0], pows_by_draw[0], once)
    u_nb = u0.copy()
    t_nb = run_batch(
        _kernels.apply_update_numba, u_nb, space.radices, draws, pows_by_draw, once
    )
    return t_np, t_nb, bool((u_np == u_nb).all())


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--updates", type=int, default=2000, help="updates per measurement")
    parser.add_argument("--policy", choices=["once", "per-pair"], default="per-pair")
    args = parser.parse_args()

    once = args.policy == "once"
    rng = np.random.default_rng(0)
    print(f"backend available: numba={_kernels.HAVE_NUMBA} (selected: {_kernels.BACKEND})")
    print(f"{args.updates} updates per cell, policy {args.policy}\n")
    header = f"{'space':>16} {'entries':>8} {'numpy us/upd':>13} {'numba us/upd':>13} {'speedup':>8} {'identical':>9}"
    print(header)
    print("-" * len(header))
    for name, sizes in SPACES:
        space = build_space(sizes)
        t_np, t_nb, same = bench(space, args.updates, once, rng)
        us_np = t_np / args.updates * 1e6
        if t_nb is None:
            print(f"{name:>16} {space.total:>8} {us_np:>13.1f} {'-':>13} {'-':>8} {'-':>9}")
        else:
            us_nb = t_nb / args.updates * 1e6
            print(
                f"{name:>16} {space.total:>8} {us_np:>13.1f} {us_nb:>13.1f} "
                f"{t_np / t_nb:>7.2f}x {str(same):>9}"
            )
    print("\n'identical' compares final mass vectors bit for bit.")


if __name__ == "__main__":
    main()
