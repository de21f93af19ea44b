"""Timing comparison of the compiled core against the NumPy fallback.

Runs each core primitive on both backends at a few sizes and prints the
per-call times with the speedup ratio. Invoke from the repository root:

    python3 benchmarks/bench_backends.py [--repeats N]
"""

import argparse
import time

import numpy as np

from anisofield import _core_np

try:
    from anisofield import _core_cy
except ImportError:
    _core_cy = None


def best_of(repeats, fn, *args):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def workloads(rng):
    for n in (1_000, 100_000, 1_000_000):
        v1 = rng.uniform(-8.0, 8.0, n)
        v2 = rng.uniform(-8.0, 8.0, n)
        yield f"fh_values n={n}", ("fh_values", (0.3, v1))
        yield f"modulation n={n}", ("modulation_values", (0.3, 0.8, v1, v2))
        yield f"rtheta n={n}", ("rtheta_values", (0.3, 0.8, 0.004, v1, v2))
    for n in (200, 800):
        u1 = rng.uniform(-2.5, 2.5, n)
        u2 = rng.uniform(-2.5, 2.5, n)
        yield f"rtheta_gram {n}x{n}", ("rtheta_gram", (0.5, 0.5, 0.004, u1, u2))
    yield "series_partial 400 terms", ("series_partial", (0.3, 1.5, 400, 1))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repetitions per workload (best is kept)")
    args = parser.parse_args()

    if _core_cy is None:
        print("compiled backend not built; showing NumPy fallback only")

    rng = np.random.default_rng(0)
    header = f"{'workload':<28}{'numpy':>12}{'compiled':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label, (name, call_args) in workloads(rng):
        t_np = best_of(args.repeats, getattr(_core_np, name), *call_args)
        if _core_cy is None:
            print(f"{label:<28}{t_np * 1e3:>10.3f}ms{'':>12}{'':>10}")
            continue
        t_cy = best_of(args.repeats, getattr(_core_cy, name), *call_args)
        out_np = getattr(_core_np, name)(*call_args)
        out_cy = getattr(_core_cy, name)(*call_args)
        if not np.allclose(out_np, out_cy, rtol=1e-12, atol=1e-15):
            raise AssertionError(f"backend outputs disagree on {label}")
        print(f"{label:<28}{t_np * 1e3:>10.3f}ms{t_cy * 1e3:>10.3f}ms"
              f"{t_np / t_cy:>9.1f}x")


if __name__ == "__main__":
    main()
