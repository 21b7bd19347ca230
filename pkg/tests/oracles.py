"""Brute-force oracles shared by the unit and acceptance suites.

The weight-grid oracle enumerates every mix of 1..5 varieties with weights
on a 0.01 grid (each at least 0.10, summing to 1), keeping it fully
independent of the vertex-enumeration path it audits.
"""

import itertools
from functools import lru_cache

import numpy as np

STEP = 0.01
MIN_W = 0.10
MAX_S = 5


@lru_cache(maxsize=None)
def grid_weights(s: int) -> np.ndarray:
    """All weight vectors of size s on the 0.01 grid, shape (n_combos, s)."""
    units = round((1.0 - MIN_W * s) / STEP)  # free 0.01 units to distribute
    combos = []
    # stars and bars: bar positions among units + s - 1 slots
    for bars in itertools.combinations(range(units + s - 1), s - 1):
        prev = -1
        counts = []
        for bar in bars:
            counts.append(bar - prev - 1)
            prev = bar
        counts.append(units + s - 1 - prev - 1)
        combos.append(counts)
    arr = np.asarray(combos if combos else [[units]], dtype=np.float64)
    return MIN_W + STEP * arr


def grid_best_for_subset(e: np.ndarray, v: np.ndarray, tau: float):
    """(objective, weights) of the best grid point for one subset, or None."""
    W = grid_weights(len(e))
    feasible = W @ v <= tau + 1e-9
    if not feasible.any():
        return None
    objectives = W @ e
    objectives = np.where(feasible, objectives, -np.inf)
    best = int(np.argmax(objectives))
    return float(objectives[best]), W[best]


def grid_optimize(e: np.ndarray, v: np.ndarray, tau: float):
    """Best grid objective over every subset of size 1..5, or None."""
    k = len(e)
    best = None
    for s in range(1, min(MAX_S, k) + 1):
        W = grid_weights(s)
        for subset in itertools.combinations(range(k), s):
            idx = list(subset)
            feasible = W @ v[idx] <= tau + 1e-9
            if not feasible.any():
                continue
            objectives = np.where(feasible, W @ e[idx], -np.inf)
            top = float(objectives.max())
            if best is None or top > best:
                best = top
    return best
