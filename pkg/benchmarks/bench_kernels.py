"""Benchmark the compiled Monte Carlo kernels against the pure NumPy ones.

Run:  python3 benchmarks/bench_kernels.py [--samples N]

Each kernel is timed on both backends with identical seeded generators;
the table reports per-sample cost and the compiled speedup factor.
"""

import argparse
import time

import numpy as np

from graphldp._kernels import load_backend

CASES = [
    ("conditional n=40 m=20", "conditional_isolated_counts", (40, 20), 1.0),
    ("conditional n=100 m=50", "conditional_isolated_counts", (100, 50), 1.0),
    ("coupled n=50 m=25", "coupled_discrepancy_stats", (50, 25), 0.05),
    ("coupled n=200 m=100", "coupled_discrepancy_stats", (200, 100), 0.01),
    ("alloc hist n=100 b=100", "allocation_profile_hist", (100, 100), 1.0),
    ("alloc empty n=100 b=100", "allocation_empty_counts", (100, 100), 1.0),
]


def time_kernel(backend, name: str, args: tuple, samples: int) -> float:
    fn = getattr(backend, name)
    rng = np.random.default_rng(np.random.SeedSequence([1, 2, 3]))
    fn(*args, rng, min(samples, 100))  # warm up
    rng = np.random.default_rng(np.random.SeedSequence([1, 2, 3]))
    start = time.perf_counter()
    fn(*args, rng, samples)
    return (time.perf_counter() - start) / samples


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=200_000)
    opts = parser.parse_args()

    pure = load_backend("pure")
    try:
        compiled = load_backend("compiled")
    except ImportError:
        compiled = None
        print("compiled backend not built; timing pure only\n")

    width = max(len(label) for label, *_ in CASES)
    header = f"{'case':<{width}}  {'pure':>12}  {'compiled':>12}  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for label, name, args, scale in CASES:
        samples = max(1000, int(opts.samples * scale))
        t_pure = time_kernel(pure, name, args, samples)
        if compiled is None:
            print(f"{label:<{width}}  {t_pure*1e6:>10.2f}us  {'-':>12}  {'-':>8}")
            continue
        t_comp = time_kernel(compiled, name, args, samples)
        print(
            f"{label:<{width}}  {t_pure*1e6:>10.2f}us  {t_comp*1e6:>10.2f}us"
            f"  {t_pure/t_comp:>7.1f}x"
        )


if __name__ == "__main__":
    main()
