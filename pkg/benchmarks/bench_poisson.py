#!/usr/bin/env python3
"""Benchmark the Poisson sampling kernels: numba JIT vs the numpy fallback.

The kernels dominate Monte-Carlo runtime; both backends follow the same
counter-based draw discipline, so outputs are asserted identical before
anything is timed.

Usage: python benchmarks/bench_poisson.py [--trials N]
"""

import argparse
import time

import numpy as np

from etpasens import _kernels as kernels

LAMBDAS = (0.5, 8.0, 2000.0, 4.3e6, 4e16)


def _time(fn, *args, repeats: int = 5) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=200_000)
    args = parser.parse_args()
    n = args.trials

    if kernels.poisson_counts_numba is None:
        print("numba is not importable; only the numpy fallback is available")
        return

    # warm the JIT cache outside the timed region
    kernels.poisson_counts_numba(0, 0, 5.0, 10)
    kernels.poisson_counts_numba(0, 0, 100.0, 10)

    print(f"{n} trials per call, best of 5")
    print(f"{'lambda':>10s} {'numba':>12s} {'numpy':>12s} {'speedup':>9s}")
    for lam in LAMBDAS:
        a = kernels.poisson_counts_numba(1, 0, lam, n)
        b = kernels.poisson_counts_numpy(1, 0, lam, n)
        assert np.array_equal(a, b), f"backend mismatch at lambda={lam}"
        t_nb = _time(kernels.poisson_counts_numba, 1, 0, lam, n)
        t_np = _time(kernels.poisson_counts_numpy, 1, 0, lam, n)
        print(f"{lam:10.3g} {t_nb*1e3:10.2f}ms {t_np*1e3:10.2f}ms {t_np/t_nb:8.1f}x")


if __name__ == "__main__":
    main()
