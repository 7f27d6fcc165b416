"""Compare the compiled and pure-Python exploration kernels.

    python3 benchmarks/bench_kernels.py [--repeat N] [--quick]

Prints one line per (instance, kernel) with the best wall time of N runs and
the resulting states per second, then the speed-up of the compiled kernel.
"""
from __future__ import annotations

import argparse
import sys
import time

from petribench.engine import ExploreOptions, explore
from petribench.kernel import AVAILABLE
from petribench.models import generate

INSTANCES = [("Philosophers", 5), ("Eratosthenes", 20), ("Peterson", 2), ("Lamport", 3),
             ("TokenRing", 10), ("Philosophers", 10), ("SimpleLbs", 3)]
QUICK = INSTANCES[:4]


def best_time(net, kernel, repeat):
    opts = ExploreOptions(kernel=kernel, max_states=None, max_seconds=None)
    best, count = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        r = explore(net, opts)
        best = min(best, time.perf_counter() - t0)
        count = r.count
    return best, count


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="small instances only")
    a = ap.parse_args(argv)
    kernels = [k for k in ("cython", "python") if k in AVAILABLE]
    if "cython" not in kernels:
        print("compiled kernel not built; timing the pure kernel only", file=sys.stderr)
    print(f"{'instance':<18} {'kernel':<7} {'states':>9} {'seconds':>9} {'states/s':>11}")
    for family, n in (QUICK if a.quick else INSTANCES):
        net = generate(family, n)
        times = {}
        for k in kernels:
            t, count = best_time(net, k, a.repeat)
            times[k] = t
            print(f"{family + '-' + str(n):<18} {k:<7} {count:>9} {t:>9.4f} {count / t:>11.0f}")
        if len(times) == 2:
            print(f"{'':<18} speed-up x{times['python'] / times['cython']:.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
