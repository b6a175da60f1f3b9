#!/usr/bin/env python3
"""Benchmark the compiled scheduling loop against the pure-Python fallback.

Workload: one 60-second run (60,000 TTIs) with 10 UEs and 12 RBGs per
scheduler/mode combination, on a pre-generated random rate grid. Run after
``pip install -e . --no-build-isolation``:

    python benchmarks/bench_kernel.py
"""

import time

import numpy as np

from ltesched import kernel

N_TTIS, N_UES, N_RBGS = 60_000, 10, 12


def workload():
    rng = np.random.default_rng(0)
    r_sb = rng.exponential(1_500.0, size=(N_TTIS, N_UES, N_RBGS))
    r_wb = r_sb.sum(axis=2) * rng.uniform(0.9, 1.1, size=(N_TTIS, N_UES))
    alphas = rng.uniform(1.0, 6.0, size=N_UES)
    return np.ascontiguousarray(r_wb), np.ascontiguousarray(r_sb), alphas


def bench(impl, kind, mode, r_wb, r_sb, alphas, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        kernel.run_schedule(kind, mode, r_wb, r_sb, N_RBGS, alphas=alphas,
                            beta=0.99, backend=impl)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    backends = kernel.available_backends()
    print(f"workload: {N_TTIS} TTIs x {N_UES} UEs x {N_RBGS} RBGs "
          f"(best of 3)\navailable backends: {', '.join(backends)}\n")
    header = f"{'scheduler':>10} {'mode':>4}" + "".join(
        f" {name:>12}" for name in backends
    )
    if len(backends) == 2:
        header += f" {'speedup':>9}"
    print(header)
    for kind in ("MTS", "BETS", "PFS", "FTGS"):
        for mode in ("TD", "FD"):
            r_wb, r_sb, alphas = workload()
            times = {
                name: bench(impl, kind, mode, r_wb, r_sb, alphas)
                for name, impl in backends.items()
            }
            row = f"{kind:>10} {mode:>4}" + "".join(
                f" {t * 1e3:>10.1f}ms" for t in times.values()
            )
            if "python" in times and "compiled" in times:
                row += f" {times['python'] / times['compiled']:>8.1f}x"
            print(row)


if __name__ == "__main__":
    main()
