"""Compare the compiled and pure-numpy tilted-sum kernels.

Two measurements:

1. in-process: the numpy twins are always importable next to whatever
   dunklheat._accel bound at import time, so both run on identical inputs
   and the per-call medians are directly comparable;
2. end-to-end: the module re-runs itself in a subprocess with
   DUNKLHEAT_NO_NUMBA=1 and times the same moment sweep, which is what the
   flag actually toggles for a user.

Run from the repo root: python3 benchmarks/bench_accel.py
"""

import argparse
import os
import statistics
import subprocess
import sys
import time

import numpy as np

from dunklheat._accel import (
    USING_NUMBA,
    jacobi_tilted_sums,
    jacobi_tilted_sums_numpy,
    laguerre_tilted_sums,
    laguerre_tilted_sums_numpy,
)
from dunklheat.kernel import moment_stats
from dunklheat.quadrature import gauss_jacobi_rule, gauss_laguerre_rule


def median_seconds(fn, args, repeats):
    fn(*args)  # warmup: jit compile, allocator, caches
    samples = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        samples.append(time.perf_counter() - start)
    return statistics.median(samples)


def bench_pairs(repeats):
    rng = np.random.default_rng(5)
    rows = []
    for n_nodes in (64, 256):
        jacobi = gauss_jacobi_rule(1.5, 1.5, n_nodes)
        laguerre = gauss_laguerre_rule(2.0, n_nodes)
        for batch in (16, 256, 4096):
            a = rng.uniform(-80.0, 80.0, batch)
            args = (jacobi.nodes, jacobi.weights, a)
            fast = median_seconds(jacobi_tilted_sums, args, repeats)
            plain = median_seconds(jacobi_tilted_sums_numpy, args, repeats)
            rows.append(("jacobi", n_nodes, batch, fast, plain))

            abs_a = np.abs(rng.uniform(60.0, 200.0, batch))
            args = (laguerre.nodes, laguerre.weights, abs_a, 1.5)
            fast = median_seconds(laguerre_tilted_sums, args, repeats)
            plain = median_seconds(laguerre_tilted_sums_numpy, args, repeats)
            rows.append(("laguerre", n_nodes, batch, fast, plain))
    return rows


def moment_sweep():
    """A representative scan workload: moment stats across mixed tilts."""
    tilts = np.concatenate([np.linspace(-45.0, 45.0, 4001), np.linspace(60.0, 400.0, 1000)])
    start = time.perf_counter()
    for kappa in (0.25, 1.0, 2.5):
        moment_stats(tilts, kappa)
    return time.perf_counter() - start


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=9, help="timing repeats (default 9)")
    parser.add_argument(
        "--sweep-only",
        action="store_true",
        help="print one end-to-end sweep time and exit (used by the subprocess leg)",
    )
    args = parser.parse_args(argv)

    if args.sweep_only:
        print(f"{moment_sweep():.4f}")
        return 0

    label = "numba" if USING_NUMBA else "numpy (DUNKLHEAT_NO_NUMBA or numba unavailable)"
    print(f"bound implementation: {label}")
    print(f"{'kernel':10} {'nodes':>5} {'batch':>6} {'bound (s)':>12} {'numpy (s)':>12} {'speedup':>8}")
    for name, n_nodes, batch, fast, plain in bench_pairs(args.repeats):
        print(f"{name:10} {n_nodes:5d} {batch:6d} {fast:12.3e} {plain:12.3e} {plain / fast:8.2f}x")

    here = moment_sweep()
    env = dict(os.environ, DUNKLHEAT_NO_NUMBA="1")
    result = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--sweep-only"],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    there = float(result.stdout.strip())
    print(f"\nmoment sweep, this process:          {here:8.3f} s")
    print(f"moment sweep, DUNKLHEAT_NO_NUMBA=1:  {there:8.3f} s")
    print(f"end-to-end ratio: {there / here:.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
