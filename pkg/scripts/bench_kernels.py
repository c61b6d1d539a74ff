#!/usr/bin/env python3
"""Time the hot kernels in both backends (numba jit vs numpy fallback).

Microbenchmarks call the two variants of each kernel directly on
representative shapes; the end-to-end section re-runs a short optimization
in subprocesses with SAFE_ASNG_NUMBA=1 and =0, since the backend is fixed
at import time. Usage: python3 scripts/bench_kernels.py [--repeats N]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from safe_asng import _kernels
from safe_asng.walsh import enumerate_basis

E2E_SNIPPET = """
import time
from safe_asng import ACTIVE_BACKEND
from safe_asng.benchmarks import generate_safe_seeds, make_problem
from safe_asng.optimizers import RunConfig, run
import numpy as np

problem = make_problem("onemax", "compatible", 10)
seeds = generate_safe_seeds(problem, 10, np.random.default_rng([0, 7]))
config = RunConfig(problem="onemax", d=10, algorithm="safe-asng",
                   safety="compatible", seed=0, max_iterations=300)
run(config, problem=problem, seeds=seeds)  # warm-up (jit compile/load)
t0 = time.perf_counter()
run(config, problem=problem, seeds=seeds)
print(f"{ACTIVE_BACKEND} {time.perf_counter() - t0:.3f}")
"""


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_cases(rng):
    for d, r, n in ((10, 2, 1000), (25, 2, 1000), (50, 1, 2000)):
        basis = enumerate_basis(d, r)
        bits = np.ascontiguousarray(
            rng.integers(0, 2, size=(n, d)), dtype=np.float64)
        args = (bits, basis.members, basis.offsets, basis.membership)
        yield (f"walsh_design d={d} r={r} n={n}",
               lambda a=args: _kernels.walsh_design_np(*a),
               lambda a=args: _kernels.walsh_design_nb(*a))

        phi = _kernels.walsh_design_np(*args)
        coef = rng.standard_normal(basis.m)
        fargs = (phi, coef, basis.members, basis.offsets, basis.membership)
        yield (f"flip_deltas  d={d} r={r} n={n}",
               lambda a=fargs: _kernels.flip_deltas_np(*a),
               lambda a=fargs: _kernels.flip_deltas_nb(*a))

    for n_archive in (500, 5000):
        cand = rng.integers(0, 1 << 25, size=250).astype(np.uint64)
        arch = rng.integers(0, 1 << 25, size=n_archive).astype(np.uint64)
        safety = rng.standard_normal((n_archive, 1))
        inv_w = rng.uniform(0.5, 2.0, size=n_archive)
        nargs = (cand, arch, safety, inv_w)
        yield (f"nearest_med  k=250 archive={n_archive}",
               lambda a=nargs: _kernels.nearest_median_safety_np(*a),
               lambda a=nargs: _kernels.nearest_median_safety_nb(*a))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=7,
                        help="timing repeats per case (best-of)")
    parser.add_argument("--skip-e2e", action="store_true",
                        help="microbenchmarks only")
    args = parser.parse_args()

    if not _kernels.HAVE_NUMBA:
        sys.exit("numba backend unavailable (SAFE_ASNG_NUMBA=0 or import "
                 "failure); nothing to compare")

    rng = np.random.default_rng(0)
    print(f"{'case':<34} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for name, np_fn, nb_fn in bench_cases(rng):
        nb_fn()  # jit warm-up outside the timed region
        t_np = best_of(np_fn, args.repeats)
        t_nb = best_of(nb_fn, args.repeats)
        print(f"{name:<34} {t_np * 1e3:>8.2f}ms {t_nb * 1e3:>8.2f}ms "
              f"{t_np / t_nb:>7.1f}x")

    if args.skip_e2e:
        return
    print("\nend-to-end (safe-asng, d=10, 300 iterations, after warm-up):")
    for flag in ("1", "0"):
        env = dict(os.environ, SAFE_ASNG_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", E2E_SNIPPET], env=env,
                             capture_output=True, text=True, check=True)
        backend, seconds = out.stdout.split()
        print(f"  {backend:<6} {float(seconds):.3f}s")


if __name__ == "__main__":
    main()
