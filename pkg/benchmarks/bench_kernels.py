"""Timing comparison of the compiled kernels against the numpy reference.

Usage: python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from roundvol._kernels import pyref

try:
    from roundvol._kernels import fastcore
except ImportError:
    fastcore = None


def bench(label, fn_py, fn_cy, repeat):
    t_py = min(timeit.repeat(fn_py, number=1, repeat=repeat))
    if fn_cy is None:
        print(f"{label:<22} python {t_py * 1e3:8.2f} ms   cython    (unavailable)")
        return
    t_cy = min(timeit.repeat(fn_cy, number=1, repeat=repeat))
    print(f"{label:<22} python {t_py * 1e3:8.2f} ms   cython {t_cy * 1e3:8.2f} ms"
          f"   speedup {t_py / t_cy:5.1f}x")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    n = 2**20
    w = rng.standard_normal(n)
    dt = 1.0 / n
    dw = rng.standard_normal(n) * np.sqrt(dt)
    u = rng.uniform(size=64)
    dwz = rng.standard_normal((64, 2**14))

    cases = [
        ("cell_sums j=10",
         lambda: pyref.cell_sums(w, n, 10),
         (lambda: fastcore.cell_sums(w, n, 10)) if fastcore else None),
        ("signed_cell_sums j=10",
         lambda: pyref.signed_cell_sums(w, n, 10),
         (lambda: fastcore.signed_cell_sums(w, n, 10)) if fastcore else None),
        ("euler_path geometric",
         lambda: pyref.euler_path(1.0, dw, dt, 1, 0.3, True, 0.0, np.inf),
         (lambda: fastcore.euler_path(1.0, dw, dt, 1, 0.3, True, 0.0, np.inf))
         if fastcore else None),
        ("zsum_squares",
         lambda: pyref.zsum_squares(u, dwz, 0.8, 1.0),
         (lambda: fastcore.zsum_squares(u, dwz, 0.8, 1.0)) if fastcore else None),
    ]
    for label, fn_py, fn_cy in cases:
        bench(label, fn_py, fn_cy, args.repeat)


if __name__ == "__main__":
    main()
