#!/usr/bin/env python3
"""Times the numba and pure-numpy backends of each hot kernel.

Run `python benchmarks/bench_kernels.py`; pass --repeat to change the
sample count. The same dual-path selection can be forced at package level
with SEEDMIX_NUMBA=0.
"""

import argparse
import time

import numpy as np

from seedmix import kernels


def timeit(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_lstm(repeat):
    rng = np.random.default_rng(0)
    H, B, T = 16, 256, 15
    args = (
        rng.uniform(-0.1, 0.1, 4 * H),
        rng.uniform(-0.1, 0.1, (4 * H, H)),
        rng.uniform(-0.1, 0.1, 4 * H),
        rng.uniform(-0.1, 0.1, H),
        0.0,
        rng.uniform(0, 1, (B, T)),
        rng.uniform(0, 1, B),
    )
    kernels.lstm_grads_numba(*args)  # compile outside the timed region
    return (
        f"lstm_grads        (H={H}, B={B}, T={T})",
        timeit(kernels.lstm_grads_numpy, args, repeat),
        timeit(kernels.lstm_grads_numba, args, repeat),
    )


def bench_split(repeat):
    rng = np.random.default_rng(1)
    n, n_classes = 20000, 20
    values = rng.normal(0, 1, n)
    labels = rng.integers(0, n_classes, n).astype(np.int64)
    args = (values, labels, n_classes, 2)
    kernels.best_numeric_split_numba(*args)
    return (
        f"best_numeric_split (n={n}, classes={n_classes})",
        timeit(kernels.best_numeric_split_numpy, args, repeat),
        timeit(kernels.best_numeric_split_numba, args, repeat),
    )


def bench_forest(repeat):
    from seedmix import datagen, yieldmodel
    from seedmix.datagen import GenConfig

    catalog = datagen.generate(
        GenConfig(n_subregions=30, n_varieties=8, years=(2000, 2011), seed=2,
                  years_per_pair=6)
    )
    scheme = yieldmodel.fit_bins([r.yield_value for r in catalog.experiments], 20)
    forest = yieldmodel.train_forest(catalog.experiments, scheme, n_trees=60, seed=0)
    rng = np.random.default_rng(3)
    X = rng.uniform(0, 20, (4000, 7))
    X[:, 6] = rng.integers(0, 8, 4000)
    args = (
        forest.node_feature, forest.node_value, forest.node_left,
        forest.node_right, forest.node_label, forest.tree_offset,
        X, yieldmodel.CAT_FEATURE,
    )
    kernels.forest_apply_numba(*args)
    return (
        f"forest_apply      (trees={forest.n_trees}, rows={len(X)})",
        timeit(kernels.forest_apply_numpy, args, repeat),
        timeit(kernels.forest_apply_numba, args, repeat),
    )


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    ns = parser.parse_args()

    if not kernels.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")

    rows = [bench_lstm(ns.repeat), bench_split(ns.repeat), bench_forest(ns.repeat)]
    print(f"{'kernel':44s} {'numpy':>10s} {'numba':>10s} {'speedup':>8s}")
    for name, t_np, t_nb in rows:
        print(f"{name:44s} {t_np * 1e3:9.2f}ms {t_nb * 1e3:9.2f}ms {t_np / t_nb:7.1f}x")


if __name__ == "__main__":
    main()
