"""Time the compiled and pure-Python SSA kernels on the same workloads.

Usage: python benchmarks/bench_ssa.py [--replicas N] [--repeat K]

Both backends must return identical paths; the script checks that before
reporting timings.
"""
import argparse
import time

import numpy as np

from parafock import ssa
from parafock.lattice import Lattice
from parafock.liouville import ModelSpec

WORKLOADS = [
    ("linear p=10", ModelSpec("linear_bd", 10, beta=1.0, mu=1.0), 5, np.linspace(0, 5, 11)),
    ("quadratic p=10", ModelSpec("quadratic_bd", 10, beta=0.5, mu=1.0), 5, np.linspace(0, 5, 11)),
    ("diffusion ring L=8 p=2", ModelSpec("diffusion", 2, nu=1.0, lattice=Lattice(8, "ring")),
     [2, 1, 0, 0, 2, 0, 1, 0], np.linspace(0, 2, 5)),
]


def best_time(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--replicas", type=int, default=20_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if "compiled" not in ssa.BACKENDS:
        print("compiled kernels not built; only the pure-Python backend is available")
    print(f"{'workload':<26}{'python [s]':>12}{'compiled [s]':>14}{'speedup':>10}")
    for name, model, initial, times in WORKLOADS:
        run = lambda b: ssa.sample_paths(model, initial, times, 0, args.replicas, backend=b)  # noqa: E731
        t_py, out_py = best_time(lambda: run("python"), 1)
        if "compiled" in ssa.BACKENDS:
            t_c, out_c = best_time(lambda: run("compiled"), args.repeat)
            if not np.array_equal(out_py, out_c):
                raise SystemExit(f"{name}: backends disagree")
            print(f"{name:<26}{t_py:>12.3f}{t_c:>14.4f}{t_py / t_c:>9.0f}x")
        else:
            print(f"{name:<26}{t_py:>12.3f}{'-':>14}{'-':>10}")


if __name__ == "__main__":
    main()
