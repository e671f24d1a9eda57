#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-Python/numpy fallback.

Runs a fixed workload (brute-force scan, simulated annealing, tabu search)
in the current process, then re-executes itself in a subprocess with
AQOCI_PURE_NUMPY=1 and compares wall times. Also verifies that both modes
produce identical results.

Usage:  python benchmarks/bench_accel.py
"""

import json
import os
import subprocess
import sys
import time


def build_problem(n: int, seed: int):
    from aqoci.qubo import QuboProblem
    from aqoci.rng import Pcg32

    rng = Pcg32(seed)
    return QuboProblem(
        n,
        {i: rng.uniform_range(-1, 1) for i in range(n)},
        {(i, j): rng.uniform_range(-1, 1) for i in range(n) for j in range(i + 1, n)},
    )


def run_workload() -> dict:
    from aqoci.qubo import brute_force_minimum
    from aqoci.samplers import (
        AnnealConfig,
        TabuConfig,
        sample_set_to_json,
        simulated_annealing,
        tabu_search,
    )

    results = {}

    problem = build_problem(18, 7)
    start = time.perf_counter()
    bits, energy = brute_force_minimum(problem)
    results["brute_force_18var"] = {
        "seconds": time.perf_counter() - start,
        "digest": f"{''.join(map(str, bits))}:{energy!r}",
    }

    problem = build_problem(60, 11)
    config = AnnealConfig(num_reads=4, sweeps=300, seed=3)
    start = time.perf_counter()
    sa = simulated_annealing(problem, config)
    results["sa_60var_4x300"] = {
        "seconds": time.perf_counter() - start,
        "digest": sample_set_to_json(sa),
    }

    start = time.perf_counter()
    tabu = tabu_search(problem, TabuConfig(restarts=4, seed=3))
    results["tabu_60var_4restarts"] = {
        "seconds": time.perf_counter() - start,
        "digest": sample_set_to_json(tabu),
    }
    return results


def main() -> int:
    if os.environ.get("BENCH_ACCEL_CHILD"):
        run_workload()  # warm-up excluded from the timed pass
        print(json.dumps(run_workload()))
        return 0

    from aqoci._accel import USE_NUMBA

    if not USE_NUMBA:
        print("numba mode is disabled in this environment; nothing to compare")
        return 1

    print("timing numba kernels (after warm-up)...")
    run_workload()  # trigger compilation
    jit_results = run_workload()

    print("timing pure fallback in a subprocess (AQOCI_PURE_NUMPY=1)...")
    env = dict(os.environ, AQOCI_PURE_NUMPY="1", BENCH_ACCEL_CHILD="1")
    out = subprocess.run(
        [sys.executable, __file__], env=env, capture_output=True, text=True, check=True
    )
    pure_results = json.loads(out.stdout.splitlines()[-1])

    print(f"\n{'workload':<24} {'numba':>10} {'pure':>10} {'speedup':>9}  identical")
    print("-" * 66)
    all_match = True
    for name, jit in jit_results.items():
        pure = pure_results[name]
        match = jit["digest"] == pure["digest"]
        all_match &= match
        speedup = pure["seconds"] / jit["seconds"] if jit["seconds"] > 0 else float("inf")
        print(
            f"{name:<24} {jit['seconds']:>9.3f}s {pure['seconds']:>9.3f}s "
            f"{speedup:>8.1f}x  {'yes' if match else 'NO'}"
        )
    if not all_match:
        print("\nresult mismatch between modes!")
        return 1
    print("\nboth modes produced identical results")
    return 0


if __name__ == "__main__":
    sys.exit(main())
