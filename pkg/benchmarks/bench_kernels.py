#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python reference.

Workloads mirror the hot paths of a full experiment run: Euler state
propagation, per-sample delay-extension mixing (the cofactor adjugate inner
loop), and the estimator recursion.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from dremnorm._kernels import available_backends


def timeit(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def build_workloads():
    rng = np.random.default_rng(0)
    n_samples = 2000

    A = np.ascontiguousarray([[0.0, 1.0], [-2.0, -1.0]])
    b = np.array([0.0, 1.0])
    u = np.ones(n_samples)
    x0 = np.zeros(2)

    z_bar = rng.standard_normal(n_samples)
    omega_bar = np.ascontiguousarray(rng.standard_normal((n_samples, 4)))
    steps = np.array([20, 40, 60], dtype=np.int64)

    n_est = 10_000
    coeff = np.abs(rng.standard_normal(n_est)) * 0.1
    target = np.ascontiguousarray(rng.standard_normal((n_est, 4)))
    active = np.ones(n_est, dtype=np.uint8)
    theta0 = np.zeros(4)

    M = np.ascontiguousarray(rng.standard_normal((4, 4)))

    return {
        "euler states (2000 x 2)": lambda k: k.lti_euler_states(A, b, u, x0, 1e-2),
        "mix series (2000 x 4x4)": lambda k: k.drem_mix_series(z_bar, omega_bar, steps),
        "gradient series (10000 x 4)": lambda k: k.gradient_series(
            coeff, coeff, target, active, 0.1, 1e-3, theta0
        ),
        "adjugate_det 4x4 (x1000)": lambda k: [k.adjugate_det(M) for _ in range(1000)],
    }


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = available_backends()
    if "compiled" not in backends:
        print("note: compiled backend not built; timing pure Python only")

    workloads = build_workloads()
    name_w = max(len(n) for n in workloads)
    header = f"{'workload':<{name_w}}  " + "  ".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, fn in workloads.items():
        times = {b: timeit(lambda m=mod: fn(m), args.repeat) for b, mod in backends.items()}
        row = f"{name:<{name_w}}  " + "  ".join(
            f"{times[b] * 1e3:>10.3f}ms" for b in backends
        )
        if "compiled" in times:
            row += f"  {times['python'] / times['compiled']:>7.1f}x"
        print(row)


if __name__ == "__main__":
    main()
