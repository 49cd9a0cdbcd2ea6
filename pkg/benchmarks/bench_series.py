#!/usr/bin/env python3
"""Benchmark the compiled summation kernel against the pure-Python fallback.

The Stern-Brocot trace summation is the hot inner loop of the identity
pipeline; everything else (root finding, finite sums, layout) is a few
milliseconds per slope.  Run:

    python benchmarks/bench_series.py [--repeats N]
"""

import argparse
import statistics
import time

from twobridge import kernels
from twobridge.markoff import geometric_evaluation
from twobridge.mcshane import boundary_edge_sets, interval_series
from twobridge.slopes import Slope

CASES = [
    ("generic p=17", Slope(5, 17), 1e-10),
    ("generic p=29", Slope(13, 29), 1e-10),
    ("exceptional 2/5", Slope(2, 5), 1e-10),
    ("exceptional 11/23", Slope(11, 23), 1e-10),
    ("slow comb 17/24", Slope(17, 24), 1e-10),
]


def time_case(kernel, r, ev, eps, repeats):
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        res1 = interval_series(r, ev, 1, eps=eps, max_depth=300, kernel=kernel)
        res2 = interval_series(r, ev, 2, eps=eps, max_depth=300, kernel=kernel)
        samples.append(time.perf_counter() - t0)
    return min(samples), res1.nodes + res2.nodes, res1.value + res2.value


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    python = kernels.get_kernel("python")
    try:
        compiled = kernels.get_kernel("compiled")
    except ImportError:
        compiled = None
        print("compiled kernel not built; timing the fallback only")

    header = "%-20s %10s %12s %12s %9s" % (
        "case", "nodes", "python [s]", "compiled [s]", "speedup")
    print(header)
    print("-" * len(header))
    for name, r, eps in CASES:
        ev = geometric_evaluation(r)
        boundary_edge_sets(r)  # warm the chain caches
        t_py, nodes, total_py = time_case(python, r, ev, eps, args.repeats)
        if compiled is None:
            print("%-20s %10d %12.4f %12s %9s" % (name, nodes, t_py, "-", "-"))
            continue
        t_cy, nodes_cy, total_cy = time_case(compiled, r, ev, eps, args.repeats)
        assert nodes == nodes_cy, "backends explored different trees"
        assert abs(total_py - total_cy) < 1e-11, "backends disagree"
        print("%-20s %10d %12.4f %12.4f %8.1fx"
              % (name, nodes, t_py, t_cy, t_py / t_cy))


if __name__ == "__main__":
    main()
