"""Mining benchmark: compiled kernel vs pure-Python fallback.

Generates a synthetic dataset, bins it, then times mine_frequent under
every available kernel and a few thread counts. Outputs are checked for
equality across runs, so the table compares identical work.

Usage: python benchmarks/bench_kernels.py [--rows N] [--min-support N]
"""

import argparse
import os
import tempfile
import time

from ruleboost import MinerConfig, available_kernels, mine_frequent
from ruleboost.cli import load_settings, load_store, stage_bin
from ruleboost.synth import generate


def build_store(rows, seed):
    with tempfile.TemporaryDirectory() as tmp:
        data = os.path.join(tmp, "data")
        out = os.path.join(tmp, "out")
        os.makedirs(out)
        generate(data, rows=rows, mpu=0, invalid=0, seed=seed)
        settings = load_settings(os.path.join(data, "config.json"))
        stage_bin(settings, out)
        store, malignant, _ = load_store(out)
    return store, malignant


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rows", type=int, default=1673)
    parser.add_argument("--min-support", type=int, default=10)
    parser.add_argument("--seed", type=int, default=20240501)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    store, malignant = build_store(args.rows, args.seed)
    config = MinerConfig.for_store(store, malignant, args.min_support, 0.0)
    jobs_grid = sorted({1, os.cpu_count() or 1})

    print(f"store: {store.n} transactions x {len(store.vocabulary)} items, "
          f"min support count {args.min_support}")

    reference = None
    results = []
    for kernel in available_kernels():
        for jobs in jobs_grid:
            best = float("inf")
            table = None
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                table = mine_frequent(store, config, kernel=kernel, jobs=jobs)
                best = min(best, time.perf_counter() - t0)
            if reference is None:
                reference = table
            assert table == reference, f"{kernel} jobs={jobs} output differs"
            results.append((kernel, jobs, best, table.total()))

    baseline = next(
        (t for k, j, t, _ in results if k == "python" and j == 1), results[0][2]
    )
    print(f"{'kernel':<8} {'jobs':>4} {'best s':>8} {'itemsets':>10} {'vs python':>10}")
    for kernel, jobs, best, total in results:
        print(f"{kernel:<8} {jobs:>4} {best:>8.2f} {total:>10,} {baseline / best:>9.2f}x")


if __name__ == "__main__":
    main()
