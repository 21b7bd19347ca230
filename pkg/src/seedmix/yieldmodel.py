"""Binned yield-distribution prediction with a from-scratch random forest.

Yield is discretized into r equal-width bins between the historical minimum
and maximum; a forest of Gini-impurity decision trees over the six condition
values plus a categorical variety feature votes on the bin, and vote counts
divided by the tree count give the per-(sub-region, variety) distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .domain import ExperimentRecord, VarietyId
from .errors import DegenerateRangeError, UnknownCategoryError

CAT_FEATURE = 6  # column index of the variety code among the 7 features
N_FEATURES = 7


@dataclass(frozen=True)
class BinScheme:
    """r equal-width bins spanning the historical yield range."""

    r: int
    lo: float
    hi: float
    edges: tuple[float, ...]

    def __post_init__(self):
        if self.r < 2:
            raise ValueError("need at least 2 bins")
        if not self.lo < self.hi:
            raise DegenerateRangeError("bin range is degenerate (lo >= hi)")
        if len(self.edges) != self.r + 1:
            raise ValueError("edges must have r + 1 entries")

    @property
    def width(self) -> float:
        return (self.hi - self.lo) / self.r

    def midpoints(self) -> np.ndarray:
        e = np.asarray(self.edges)
        return (e[:-1] + e[1:]) / 2.0


def fit_bins(yields: Sequence[float], r: int) -> BinScheme:
    """Equal-width bin edges over [min(yields), max(yields)]."""
    if r < 2:
        raise ValueError("need at least 2 bins")
    arr = np.asarray(yields, dtype=np.float64)
    if arr.size < 2 or float(arr.min()) == float(arr.max()):
        raise DegenerateRangeError("need at least two distinct yield values")
    lo, hi = float(arr.min()), float(arr.max())
    edges = tuple(float(v) for v in np.linspace(lo, hi, r + 1))
    return BinScheme(r=r, lo=lo, hi=hi, edges=edges)


def bin_of(scheme: BinScheme, value: float) -> int:
    """Left-closed bin index; values at or past the ends clamp to 0 / r-1."""
    if not math.isfinite(value):
        raise ValueError("yield value must be finite")
    idx = int(math.floor((value - scheme.lo) / scheme.width))
    return max(0, min(scheme.r - 1, idx))


@dataclass(frozen=True)
class FeatureSchema:
    """Maps (weather, soil, variety) onto the 7-column feature vector."""

    weather_names: tuple[str, ...]
    soil_names: tuple[str, ...]
    varieties: tuple[VarietyId, ...]  # sorted; index is the category code
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(
            self, "_index", {v: i for i, v in enumerate(self.varieties)}
        )

    def variety_code(self, variety: VarietyId) -> int:
        try:
            return self._index[variety]
        except KeyError:
            raise UnknownCategoryError(f"unknown variety {variety!r}") from None

    def encode(
        self, weather: Sequence[float], soil: Sequence[float], variety: VarietyId
    ) -> np.ndarray:
        row = np.empty(N_FEATURES)
        row[0:3] = weather
        row[3:6] = soil
        row[CAT_FEATURE] = self.variety_code(variety)
        if not np.all(np.isfinite(row)):
            raise ValueError("features must be finite")
        return row


@dataclass
class Forest:
    """Trees stored as flat stacked node arrays (see kernels.forest_apply)."""

    node_feature: np.ndarray  # int64; -1 marks a leaf
    node_value: np.ndarray  # float64 threshold, or category code at CAT_FEATURE
    node_left: np.ndarray  # int64, index within the same tree
    node_right: np.ndarray
    node_label: np.ndarray  # int64 bin label at leaves, -1 elsewhere
    tree_offset: np.ndarray  # int64, length n_trees + 1
    n_trees: int
    schema: FeatureSchema
    scheme: BinScheme
    seed: int
    oob_accuracy: float | None = None


def _gini_split_categorical(codes, labels, n_classes, min_leaf):
    """Best equality split on the categorical column; integral count math."""
    n = codes.shape[0]
    cats = np.unique(codes)
    if cats.size < 2:
        return False, 0.0, 1.0
    total = np.bincount(labels, minlength=n_classes).astype(np.int64)
    best = (False, 0.0, 1.0)
    best_imp = np.inf
    for cat in cats:
        mask = codes == cat
        nl = int(mask.sum())
        nr = n - nl
        if nl < min_leaf or nr < min_leaf:
            continue
        left = np.bincount(labels[mask], minlength=n_classes).astype(np.int64)
        right = total - left
        score = float((left * left).sum()) / nl + float((right * right).sum()) / nr
        imp = 1.0 - score / n
        if imp < best_imp:
            best_imp = imp
            best = (True, float(cat), imp)
    return best


class _TreeBuilder:
    """Grows one tree into flat node lists via an explicit stack."""

    def __init__(self, X, labels, n_classes, rng, min_leaf, n_candidates):
        self.X = X
        self.labels = labels
        self.n_classes = n_classes
        self.rng = rng
        self.min_leaf = min_leaf
        self.n_candidates = n_candidates
        self.feature: list[int] = []
        self.value: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.label: list[int] = []

    def _new_node(self) -> int:
        self.feature.append(-1)
        self.value.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.label.append(-1)
        return len(self.feature) - 1

    def _leaf(self, node: int, idx: np.ndarray) -> None:
        counts = np.bincount(self.labels[idx], minlength=self.n_classes)
        self.label[node] = int(np.argmax(counts))

    def build(self) -> int:
        root = self._new_node()
        stack = [(root, np.arange(self.X.shape[0]))]
        while stack:
            node, idx = stack.pop()
            node_labels = self.labels[idx]
            if idx.size < 2 * self.min_leaf or np.all(node_labels == node_labels[0]):
                self._leaf(node, idx)
                continue
            # walk a random feature order until n_candidates of them produced a
            # valid split; features with no valid split do not count, so a node
            # only turns into a leaf when genuinely unsplittable
            order = self.rng.permutation(N_FEATURES)
            best_f, best_v, best_imp, best_cat = -1, 0.0, np.inf, False
            valid_seen = 0
            for f in order:
                col = self.X[idx, f]
                if f == CAT_FEATURE:
                    found, v, imp = _gini_split_categorical(
                        col.astype(np.int64), node_labels, self.n_classes, self.min_leaf
                    )
                else:
                    found, v, imp = kernels.best_numeric_split(
                        np.ascontiguousarray(col),
                        np.ascontiguousarray(node_labels),
                        self.n_classes,
                        self.min_leaf,
                    )
                if found:
                    valid_seen += 1
                    if imp < best_imp:
                        best_f, best_v, best_imp, best_cat = int(f), v, imp, f == CAT_FEATURE
                    if valid_seen >= self.n_candidates:
                        break
            if best_f < 0:
                self._leaf(node, idx)
                continue
            col = self.X[idx, best_f]
            go_left = col == best_v if best_cat else col <= best_v
            self.feature[node] = best_f
            self.value[node] = best_v
            left_node = self._new_node()
            right_node = self._new_node()
            self.left[node] = left_node
            self.right[node] = right_node
            stack.append((left_node, idx[go_left]))
            stack.append((right_node, idx[~go_left]))
        return root


def train_forest(
    records: Sequence[ExperimentRecord],
    scheme: BinScheme,
    n_trees: int = 100,
    seed: int = 0,
    *,
    bootstrap: bool = True,
    min_leaf: int = 2,
    schema: FeatureSchema | None = None,
) -> Forest:
    """Fit an ensemble of Gini trees on bootstrap samples of the records.

    Per-tree RNG streams come from SeedSequence(seed).spawn, so the forest
    is reproducible no matter how tree training would be scheduled.
    """
    if not records:
        raise ValueError("need at least one record")
    if n_trees < 1:
        raise ValueError("need at least one tree")
    if schema is None:
        from .domain import SOIL_ATTRIBUTES, WEATHER_ATTRIBUTES

        schema = FeatureSchema(
            weather_names=WEATHER_ATTRIBUTES,
            soil_names=SOIL_ATTRIBUTES,
            varieties=tuple(sorted({r.variety for r in records})),
        )

    n = len(records)
    X = np.empty((n, N_FEATURES))
    labels = np.empty(n, dtype=np.int64)
    for i, rec in enumerate(records):
        X[i] = schema.encode(rec.weather, rec.soil, rec.variety)
        labels[i] = bin_of(scheme, rec.yield_value)

    n_candidates = max(1, int(math.sqrt(N_FEATURES)))
    children = np.random.SeedSequence(seed).spawn(n_trees)

    features, values, lefts, rights, labels_out = [], [], [], [], []
    offsets = [0]
    oob_votes = np.zeros((n, scheme.r), dtype=np.int64)
    for t in range(n_trees):
        rng = np.random.default_rng(children[t])
        if bootstrap:
            sample = rng.integers(0, n, n)
        else:
            sample = np.arange(n)
        builder = _TreeBuilder(
            X[sample], labels[sample], scheme.r, rng, min_leaf, n_candidates
        )
        builder.build()
        features.extend(builder.feature)
        values.extend(builder.value)
        lefts.extend(builder.left)
        rights.extend(builder.right)
        labels_out.extend(builder.label)
        offsets.append(len(features))
        if bootstrap:
            oob = np.setdiff1d(np.arange(n), sample, assume_unique=False)
            if oob.size:
                tree_forest = _single_tree_view(
                    builder, np.ascontiguousarray(X[oob])
                )
                for row, lab in zip(oob, tree_forest):
                    oob_votes[row, lab] += 1

    oob_accuracy = None
    if bootstrap:
        covered = oob_votes.sum(axis=1) > 0
        if covered.any():
            preds = oob_votes[covered].argmax(axis=1)
            oob_accuracy = float(np.mean(preds == labels[covered]))

    return Forest(
        node_feature=np.asarray(features, dtype=np.int64),
        node_value=np.asarray(values, dtype=np.float64),
        node_left=np.asarray(lefts, dtype=np.int64),
        node_right=np.asarray(rights, dtype=np.int64),
        node_label=np.asarray(labels_out, dtype=np.int64),
        tree_offset=np.asarray(offsets, dtype=np.int64),
        n_trees=n_trees,
        schema=schema,
        scheme=scheme,
        seed=seed,
        oob_accuracy=oob_accuracy,
    )


def _single_tree_view(builder: _TreeBuilder, X: np.ndarray) -> np.ndarray:
    """Apply one freshly built tree to a feature matrix."""
    out = kernels.forest_apply(
        np.asarray(builder.feature, dtype=np.int64),
        np.asarray(builder.value, dtype=np.float64),
        np.asarray(builder.left, dtype=np.int64),
        np.asarray(builder.right, dtype=np.int64),
        np.asarray(builder.label, dtype=np.int64),
        np.asarray([0, len(builder.feature)], dtype=np.int64),
        X,
        CAT_FEATURE,
    )
    return out[:, 0]


@dataclass(frozen=True)
class YieldDistribution:
    """Probability over the r yield bins for one (sub-region, variety)."""

    scheme: BinScheme
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=np.float64)
        if p.shape != (self.scheme.r,):
            raise ValueError("probs length must equal the bin count")
        if np.any(p < 0) or np.any(p > 1):
            raise ValueError("probabilities must lie in [0, 1]")
        if abs(float(p.sum()) - 1.0) > 1e-9:
            raise ValueError(f"probabilities must sum to 1, got {p.sum()}")
        object.__setattr__(self, "probs", p)


def predict_labels(forest: Forest, X: np.ndarray) -> np.ndarray:
    """Leaf labels, shape (n_samples, n_trees)."""
    return kernels.forest_apply(
        forest.node_feature,
        forest.node_value,
        forest.node_left,
        forest.node_right,
        forest.node_label,
        forest.tree_offset,
        np.ascontiguousarray(X, dtype=np.float64),
        CAT_FEATURE,
    )


def predict_proba(forest: Forest, X: np.ndarray) -> np.ndarray:
    """Vote shares per bin, shape (n_samples, r)."""
    labels = predict_labels(forest, X)
    n = X.shape[0]
    probs = np.zeros((n, forest.scheme.r))
    for i in range(n):
        probs[i] = np.bincount(labels[i], minlength=forest.scheme.r)
    return probs / forest.n_trees


def predict_distribution(
    forest: Forest,
    weather: Sequence[float],
    soil: Sequence[float],
    variety: VarietyId,
) -> YieldDistribution:
    """Tree-vote distribution for one condition vector and variety."""
    row = forest.schema.encode(weather, soil, variety)
    probs = predict_proba(forest, row[None, :])[0]
    return YieldDistribution(scheme=forest.scheme, probs=probs)


def expected_value(d: YieldDistribution) -> float:
    """Mean yield, with each bin represented by its midpoint."""
    return float(d.probs @ d.scheme.midpoints())


def variance(d: YieldDistribution) -> float:
    """Variance of the midpoint-represented distribution."""
    m = d.scheme.midpoints()
    e = float(d.probs @ m)
    return float(d.probs @ (m - e) ** 2)


def forest_to_doc(forest: Forest) -> dict:
    """Versioned JSON-able document with per-tree node lists."""
    trees = []
    for t in range(forest.n_trees):
        a, b = int(forest.tree_offset[t]), int(forest.tree_offset[t + 1])
        trees.append(
            {
                "feature": forest.node_feature[a:b].tolist(),
                "value": forest.node_value[a:b].tolist(),
                "left": forest.node_left[a:b].tolist(),
                "right": forest.node_right[a:b].tolist(),
                "label": forest.node_label[a:b].tolist(),
            }
        )
    return {
        "format": "seedmix.forest",
        "version": 1,
        "n_trees": forest.n_trees,
        "seed": forest.seed,
        "oob_accuracy": forest.oob_accuracy,
        "schema": {
            "weather_names": list(forest.schema.weather_names),
            "soil_names": list(forest.schema.soil_names),
            "varieties": list(forest.schema.varieties),
        },
        "bins": {
            "r": forest.scheme.r,
            "lo": forest.scheme.lo,
            "hi": forest.scheme.hi,
            "edges": list(forest.scheme.edges),
        },
        "trees": trees,
    }


def forest_from_doc(doc: dict) -> Forest:
    if doc.get("format") != "seedmix.forest":
        raise ValueError("not a forest document")
    if doc.get("version") != 1:
        raise ValueError(f"unsupported forest version {doc.get('version')}")
    schema = FeatureSchema(
        weather_names=tuple(doc["schema"]["weather_names"]),
        soil_names=tuple(doc["schema"]["soil_names"]),
        varieties=tuple(doc["schema"]["varieties"]),
    )
    bins = doc["bins"]
    scheme = BinScheme(
        r=int(bins["r"]),
        lo=float(bins["lo"]),
        hi=float(bins["hi"]),
        edges=tuple(float(v) for v in bins["edges"]),
    )
    features, values, lefts, rights, labels = [], [], [], [], []
    offsets = [0]
    for tree in doc["trees"]:
        features.extend(tree["feature"])
        values.extend(tree["value"])
        lefts.extend(tree["left"])
        rights.extend(tree["right"])
        labels.extend(tree["label"])
        offsets.append(len(features))
    return Forest(
        node_feature=np.asarray(features, dtype=np.int64),
        node_value=np.asarray(values, dtype=np.float64),
        node_left=np.asarray(lefts, dtype=np.int64),
        node_right=np.asarray(rights, dtype=np.int64),
        node_label=np.asarray(labels, dtype=np.int64),
        tree_offset=np.asarray(offsets, dtype=np.int64),
        n_trees=int(doc["n_trees"]),
        schema=schema,
        scheme=scheme,
        seed=int(doc["seed"]),
        oob_accuracy=doc.get("oob_accuracy"),
    )
