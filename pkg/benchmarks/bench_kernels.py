"""Time each array kernel under the numba and numpy backends.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Compilation is triggered once before timing, so numba numbers are warm.
"""
import argparse
import time

import numpy as np

from cachedof import _kernels
from cachedof.bounds import default_grid


def workloads():
    rng = np.random.default_rng(0)
    grid = default_grid()
    rx = rng.random((6, 6, 20_000)) < 0.3
    ks = rng.integers(1, 129, size=20_000)
    rs = 1 + rng.random(20_000) * (ks - 1)
    coeffs = rng.standard_normal(65)
    xs = np.linspace(0, 1, 200_000)
    return {
        "leg_sums (default grid)": lambda: _kernels.leg_sums(grid.kr, grid.mur, grid.kt * grid.mut),
        "holder_histogram (6 rx, 20k pkts)": lambda: _kernels.holder_histogram(rx, [1, 2, 3, 4, 5, 6]),
        "cached_count_histogram": lambda: _kernels.cached_count_histogram(rx),
        "poly_values (deg 64, 200k pts)": lambda: _kernels.poly_values(coeffs, xs),
        "pinelis_sides (20k cells)": lambda: _kernels.pinelis_sides(ks, rs),
    }


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = ["numba", "numpy"] if _kernels.HAVE_NUMBA else ["numpy"]
    jobs = workloads()
    results = {}
    for name in backends:
        prev = _kernels.set_backend(name)
        try:
            for label, fn in jobs.items():
                fn()  # warm-up / JIT
                results[label, name] = best_of(fn, args.repeat)
        finally:
            _kernels.set_backend(prev)
    width = max(map(len, jobs))
    print(f"{'kernel':<{width}}  " + "  ".join(f"{b:>10}" for b in backends) + "     speedup")
    for label in jobs:
        row = [results[label, b] for b in backends]
        speed = f"{row[1] / row[0]:9.1f}x" if len(row) == 2 else ""
        print(f"{label:<{width}}  " + "  ".join(f"{t * 1e3:8.2f}ms" for t in row) + f"  {speed}")


if __name__ == "__main__":
    main()
