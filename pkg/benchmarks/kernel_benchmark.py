#!/usr/bin/env python3
"""Benchmark the compiled pairwise kernels against the pure-Python fallback.

Times the alignment right-hand side, the minimum-gap scan, and the gap-power
pair sum across system sizes, and prints the speedup of the compiled backend.

    python benchmarks/kernel_benchmark.py --sizes 8,64,256,1024 --repeat 5
"""

import argparse
import json
import time

import numpy as np

import sflock._kernels_py as pure

try:
    import sflock._kernels as compiled
except ImportError:
    compiled = None


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_backend(mod, pos, vel, repeat):
    return {
        "rhs": _time(lambda: mod.rhs_dvel(pos, vel, 0, 1.5, 0.0, 0.0, 1.25, False), repeat),
        "min_pair": _time(lambda: mod.min_pair(pos), repeat),
        "gap_sum": _time(lambda: mod.pair_gap_pow_sum(pos, 0.5, 0.0, False), repeat),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="8,64,256,1024")
    ap.add_argument("--dim", type=int, default=2)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", action="store_true", help="emit a JSON report")
    args = ap.parse_args()

    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(0)
    results = []
    for n in sizes:
        pos = rng.uniform(0.0, 10.0, (n, args.dim))
        vel = rng.uniform(-1.0, 1.0, (n, args.dim))
        row = {"n": n, "python": bench_backend(pure, pos, vel, args.repeat)}
        if compiled is not None:
            row["compiled"] = bench_backend(compiled, pos, vel, args.repeat)
        results.append(row)

    if args.json:
        print(json.dumps(results, indent=2))
        return

    if compiled is None:
        print("compiled extension not available; timing the fallback only\n")
    header = f"{'N':>6}  {'kernel':<9} {'python [ms]':>12}"
    if compiled is not None:
        header += f" {'compiled [ms]':>14} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for row in results:
        for kernel in ("rhs", "min_pair", "gap_sum"):
            py = row["python"][kernel] * 1e3
            line = f"{row['n']:>6}  {kernel:<9} {py:>12.3f}"
            if compiled is not None:
                cy = row["compiled"][kernel] * 1e3
                line += f" {cy:>14.4f} {py / cy:>8.1f}x"
            print(line)


if __name__ == "__main__":
    main()
