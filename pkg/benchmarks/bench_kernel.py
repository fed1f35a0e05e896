#!/usr/bin/env python3
"""Benchmark the two partition-scan lanes on growing ground sets.

The scan visits every partition with at least two blocks (Bell(n) - 1 of
them), so runtime is dominated by n. Run from the repository root:

    python benchmarks/bench_kernel.py --max-n 11

The compiled lane needs `python setup.py build_ext --inplace` first; without
it only the pure lane is timed.
"""

from __future__ import annotations

import argparse
import time

import ska.kernel as kernel
from ska import mmi, pin_source
from ska.mmi import scaled_entropies

BELL = [1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975, 678570, 4213597]


def cycle(n: int):
    return pin_source([(i, i % n + 1, 1) for i in range(1, n + 1)])


def time_backend(n: int, ent, backend: str, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        kernel.minimize_over_partitions(n, ent, backend=backend)
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--min-n", type=int, default=6)
    parser.add_argument("--max-n", type=int, default=11)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    fast = kernel.has_fast_lane()
    print(f"compiled lane available: {fast}")
    header = f"{'n':>3} {'partitions':>10} {'pure (s)':>10}"
    if fast:
        header += f" {'fast (s)':>10} {'speedup':>8}"
    print(header)
    for n in range(args.min_n, args.max_n + 1):
        source = cycle(n)
        ent, _ = scaled_entropies(source)
        pure = time_backend(n, ent, "pure", args.repeats)
        row = f"{n:>3} {BELL[n] - 1:>10} {pure:>10.4f}"
        if fast:
            quick = time_backend(n, ent, "fast", args.repeats)
            row += f" {quick:>10.4f} {pure / quick:>7.1f}x"
        print(row)
        # sanity: both lanes must produce the same MMI end to end
        if fast:
            assert mmi(source, backend="pure") == mmi(source, backend="fast")


if __name__ == "__main__":
    main()
