#!/usr/bin/env python3
"""Compare the numpy and numba implementations of the five hot kernels.

Both backends expose identical contracts (see fraudq.accel); this script
times each kernel on a representative workload and prints the speedup.
Numba work is compiled on a warmup call before any timing starts.

Run: python3 benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

import fraudq.accel
from fraudq.accel import numpy_kernels

try:
    from fraudq.accel import numba_kernels
except ImportError:
    numba_kernels = None


def build_cases(rng):
    n_qubits = 12
    dim = 1 << n_qubits
    state = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    state /= np.linalg.norm(state)
    c, s = np.cos(0.15), np.sin(0.15)

    n_split = 200_000
    values = np.sort(rng.uniform(size=n_split))
    pos = (rng.random(n_split) < 0.3).astype(np.float64)
    grad = rng.normal(size=n_split)
    hess = rng.uniform(0.01, 0.25, size=n_split)

    X = np.vstack([rng.normal(size=(200, 6)) - 1.5, rng.normal(size=(200, 6)) + 1.5])
    K = X @ X.T
    y = np.array([-1.0] * 200 + [1.0] * 200)

    def rotations(mod):
        amps = state.copy()
        for qubit in range(n_qubits):
            for _ in range(10):
                mod.apply_1q(amps, qubit, c + 0j, -s + 0j, s + 0j, c + 0j)

    def cnots(mod):
        amps = state.copy()
        for qubit in range(n_qubits):
            for _ in range(10):
                mod.apply_cnot(amps, qubit, (qubit + 1) % n_qubits)

    def gini(mod):
        mod.best_split_gini(values, pos, 5)

    def newton(mod):
        mod.best_split_newton(values, grad, hess, 1.0, 5)

    def smo(mod):
        mod.smo_precomputed(K, y, 1.0, 1e-3, 200_000)

    return [
        (f"apply_1q x120 ({n_qubits} qubits)", rotations),
        (f"apply_cnot x120 ({n_qubits} qubits)", cnots),
        (f"best_split_gini (n={n_split})", gini),
        (f"best_split_newton (n={n_split})", newton),
        ("smo_precomputed (400x400 gram)", smo),
    ]


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repeats per kernel; best time wins")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    print(f"selected backend for this environment: {fraudq.accel.BACKEND}")
    if numba_kernels is None:
        print("numba is not importable; showing numpy times only\n")

    cases = build_cases(np.random.default_rng(args.seed))
    width = max(len(name) for name, _ in cases)
    print(f"{'kernel':<{width}}  {'numpy':>10}  {'numba':>10}  {'speedup':>8}")
    for name, runner in cases:
        runner(numpy_kernels)
        t_np = best_of(lambda: runner(numpy_kernels), args.repeats)
        if numba_kernels is None:
            print(f"{name:<{width}}  {t_np * 1e3:>8.2f}ms  {'-':>10}  {'-':>8}")
            continue
        runner(numba_kernels)
        t_nb = best_of(lambda: runner(numba_kernels), args.repeats)
        print(f"{name:<{width}}  {t_np * 1e3:>8.2f}ms  {t_nb * 1e3:>8.2f}ms  "
              f"{t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
