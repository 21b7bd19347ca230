"""Variety-mix optimization for one sub-region.

Given per-variety expected yields and variances, varieties are scored by
norm(E) + (1 - norm(Var)), the top k kept, and for each variability budget
tau the best weighted mix of up to five of them is found: maximize the
weighted expected yield subject to weights summing to 1, each selected
weight at least 0.1, and the weighted normalized variance at most tau.

The mix LP is solved exactly by vertex enumeration: with one equality, one
budget inequality and per-variety lower bounds, an optimal basic solution
has at most two weights above the 0.1 floor, so it suffices to check every
single-variety vertex and every budget-tight pair. Correctness is audited
against a brute-force weight-grid oracle in the tests.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import DegenerateRangeError, NoSolutionError

MIN_WEIGHT = 0.10
MAX_VARIETIES = 5
TAU_GRID = tuple(i / 10 for i in range(1, 11))
FEAS_TOL = 1e-9


@dataclass(frozen=True)
class VarietyStats:
    """Raw and min-max normalized distribution moments for one variety."""

    variety: str
    e: float
    var: float
    norm_e: float
    norm_var: float

    def __post_init__(self):
        if not 0.0 <= self.norm_e <= 1.0 or not 0.0 <= self.norm_var <= 1.0:
            raise ValueError("normalized moments must lie in [0, 1]")


def normalize_stats(moments: Sequence[tuple[str, float, float]]) -> list[VarietyStats]:
    """Min-max normalize (E, Var) over one sub-region's varieties.

    When all values coincide the normalized value is defined as 0.
    """
    if not moments:
        return []
    es = np.array([m[1] for m in moments], dtype=np.float64)
    vs = np.array([m[2] for m in moments], dtype=np.float64)

    def norm(arr):
        lo, hi = float(arr.min()), float(arr.max())
        if hi > lo:
            return (arr - lo) / (hi - lo)
        return np.zeros_like(arr)

    ne, nv = norm(es), norm(vs)
    return [
        VarietyStats(variety=m[0], e=float(es[i]), var=float(vs[i]),
                     norm_e=float(ne[i]), norm_var=float(nv[i]))
        for i, m in enumerate(moments)
    ]


def score(norm_e: float, norm_var: float) -> float:
    """Selection score: high expected yield, low variance, both normalized."""
    return norm_e + (1.0 - norm_var)


def top_k(stats: Sequence[VarietyStats], k: int) -> list[VarietyStats]:
    """The k highest-scoring varieties; ties prefer the smaller code."""
    if k > len(stats):
        raise ValueError(f"k={k} exceeds the {len(stats)} available varieties")
    ranked = sorted(stats, key=lambda s: (-score(s.norm_e, s.norm_var), s.variety))
    return ranked[:k]


def solve_subset(
    e: Sequence[float], norm_var: Sequence[float], tau: float
) -> np.ndarray | None:
    """Exact optimal weights for one fixed subset, or None if infeasible.

    Feasibility check: putting the 0.1 floor on everything except the
    lowest-variance variety is the minimum-variability assignment; if even
    that exceeds tau the subset has no feasible weights.
    """
    e = np.asarray(e, dtype=np.float64)
    v = np.asarray(norm_var, dtype=np.float64)
    s = e.shape[0]
    if not 1 <= s <= MAX_VARIETIES:
        raise ValueError(f"subset size must be 1..{MAX_VARIETIES}, got {s}")

    free = 1.0 - MIN_WEIGHT * s  # mass to distribute above the floors
    budget = tau - MIN_WEIGHT * float(v.sum())
    if float(v.min()) * free > budget + FEAS_TOL:
        return None

    best_obj = -np.inf
    best_w = None

    # vertices with a single weight above the floor
    for l in range(s):
        if v[l] * free <= budget + FEAS_TOL:
            w = np.full(s, MIN_WEIGHT)
            w[l] += free
            obj = float(w @ e)
            if obj > best_obj:
                best_obj, best_w = obj, w

    # vertices where the variability budget is tight across two weights
    for a, b in itertools.combinations(range(s), 2):
        if v[a] == v[b]:
            continue
        ua = (budget - v[b] * free) / (v[a] - v[b])
        ub = free - ua
        if ua < -FEAS_TOL or ub < -FEAS_TOL:
            continue
        w = np.full(s, MIN_WEIGHT)
        w[a] += max(ua, 0.0)
        w[b] += max(ub, 0.0)
        obj = float(w @ e)
        if obj > best_obj:
            best_obj, best_w = obj, w

    return best_w


def solution_sd(
    weights: Sequence[float], variances: Sequence[float], *, divisor_entries: bool = False
) -> float:
    """Weighted standard deviation summary: sum of w * sqrt(Var) over the mix.

    The divisor is 5 regardless of how many varieties the mix holds; pass
    divisor_entries=True for the entry-count alternative.
    """
    w = np.asarray(weights, dtype=np.float64)
    var = np.asarray(variances, dtype=np.float64)
    divisor = len(w) if divisor_entries else MAX_VARIETIES
    return float(w @ np.sqrt(var)) / divisor


def solution_offset(sd: float, expected_yield: float) -> float:
    """S.D. as a percentage of expected yield."""
    if expected_yield == 0:
        raise DegenerateRangeError("offset undefined: expected yield is zero")
    return sd / expected_yield * 100.0


@dataclass(frozen=True)
class PortfolioSolution:
    """Up to five (variety, weight) pairs meeting a variability budget."""

    entries: tuple[tuple[str, float], ...]
    tau: float
    expected_yield: float
    variability: float
    sd: float
    offset_pct: float | None  # None when expected yield is zero

    def __post_init__(self):
        if not 1 <= len(self.entries) <= MAX_VARIETIES:
            raise ValueError("solutions hold 1..5 entries")
        weights = [w for _, w in self.entries]
        if abs(sum(weights) - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")
        if any(w < MIN_WEIGHT - 1e-9 for w in weights):
            raise ValueError("every selected weight must be at least 0.1")
        if self.variability > self.tau + 1e-9:
            raise ValueError("variability exceeds tau")
        codes = [c for c, _ in self.entries]
        if len(set(codes)) != len(codes):
            raise ValueError("entry varieties must be distinct")

    def weight_of(self, variety: str) -> float:
        for code, w in self.entries:
            if code == variety:
                return w
        return 0.0

    def to_json(self) -> dict:
        return {
            "tau": self.tau,
            "entries": [{"variety_id": c, "weight": w} for c, w in self.entries],
            "expected_yield": self.expected_yield,
            "variability": self.variability,
            "sd": self.sd,
            "offset_pct": self.offset_pct,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "PortfolioSolution":
        offset = doc["offset_pct"]
        return cls(
            entries=tuple((e["variety_id"], float(e["weight"])) for e in doc["entries"]),
            tau=float(doc["tau"]),
            expected_yield=float(doc["expected_yield"]),
            variability=float(doc["variability"]),
            sd=float(doc["sd"]),
            offset_pct=None if offset is None else float(offset),
        )


def _better(cand: tuple, best: tuple | None) -> bool:
    """Maximum objective, then lower variability, then smaller code tuple."""
    if best is None:
        return True
    obj_c, var_c, codes_c = cand
    obj_b, var_b, codes_b = best
    if obj_c != obj_b:
        return obj_c > obj_b
    if var_c != var_b:
        return var_c < var_b
    return codes_c < codes_b


def optimize_subregion(
    stats: Sequence[VarietyStats],
    tau: float,
    *,
    divisor_entries: bool = False,
) -> PortfolioSolution | None:
    """Best feasible mix over every subset of 1..5 varieties, or None.

    The caller passes the top-k stats (k <= 10 keeps enumeration small).
    """
    if not stats:
        raise ValueError("no variety stats given")
    best_key: tuple | None = None
    best_solution: PortfolioSolution | None = None
    for size in range(1, min(MAX_VARIETIES, len(stats)) + 1):
        for combo in itertools.combinations(stats, size):
            e = np.array([s.e for s in combo])
            v = np.array([s.norm_var for s in combo])
            w = solve_subset(e, v, tau)
            if w is None:
                continue
            obj = float(w @ e)
            variability = float(w @ v)
            order = np.argsort([s.variety for s in combo])
            entries = tuple((combo[i].variety, float(w[i])) for i in order)
            codes = tuple(c for c, _ in entries)
            key = (obj, variability, codes)
            if _better(key, best_key):
                sd = solution_sd(
                    [we for _, we in entries],
                    [combo[i].var for i in order],
                    divisor_entries=divisor_entries,
                )
                best_key = key
                best_solution = PortfolioSolution(
                    entries=entries,
                    tau=tau,
                    expected_yield=obj,
                    variability=variability,
                    sd=sd,
                    offset_pct=None if obj == 0 else solution_offset(sd, obj),
                )
    return best_solution


def tau_sweep(
    stats: Sequence[VarietyStats], *, divisor_entries: bool = False
) -> dict[float, PortfolioSolution]:
    """Solutions at tau in {0.1, ..., 1.0}; infeasible thresholds are absent."""
    sweep: dict[float, PortfolioSolution] = {}
    for tau in TAU_GRID:
        sol = optimize_subregion(stats, tau, divisor_entries=divisor_entries)
        if sol is not None:
            sweep[tau] = sol
    return sweep


def default_solution(sweep: Mapping[float, PortfolioSolution]) -> PortfolioSolution:
    """Maximum expected yield, then minimum variability, then smallest tau."""
    if not sweep:
        raise NoSolutionError("no feasible solution at any variability threshold")
    best = None
    for tau in sorted(sweep):
        sol = sweep[tau]
        if best is None:
            best = sol
            continue
        if sol.expected_yield > best.expected_yield or (
            sol.expected_yield == best.expected_yield
            and sol.variability < best.variability
        ):
            best = sol
    return best
