"""Next-year weather prediction with a single-layer gated recurrent cell.

One model is trained per weather attribute across all sub-regions: each
sub-region contributes one (sequence, target) pair where the sequence is the
attribute's values for every year before the target year, min-max normalized
to [0, 1] with bounds taken from the training set. Training is full-batch
gradient descent on mean squared error, backpropagated through time by the
kernels module. Soil attributes are static and never forecast.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .domain import SubRegion
from .errors import DataGapError, DegenerateRangeError, DivergenceError

MODEL_FORMAT = "seedmix.sequence-model"
MODEL_VERSION = 1


@dataclass
class TrainConfig:
    epochs: int = 500
    learning_rate: float = 0.05
    hidden_size: int = 16
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        # 0 is allowed so a zero-step run can be expressed; negative is not
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be >= 0")
        if self.hidden_size < 1:
            raise ValueError("hidden_size must be >= 1")


@dataclass
class SequenceModel:
    """Trained cell parameters plus the normalization bounds they assume.

    Gate layout along the 4H axis is [input, forget, candidate, output];
    ``wy``/``by`` form the linear readout of the final hidden state.
    """

    hidden_size: int
    wx: np.ndarray  # (4H,)
    wh: np.ndarray  # (4H, H)
    b: np.ndarray  # (4H,)
    wy: np.ndarray  # (H,)
    by: float
    bounds: tuple[float, float]

    def __post_init__(self):
        if self.hidden_size < 1:
            raise ValueError("hidden_size must be >= 1")
        for arr in (self.wx, self.wh, self.b, self.wy):
            if not np.all(np.isfinite(arr)):
                raise ValueError("model parameters must be finite")
        if not math.isfinite(self.by):
            raise ValueError("model parameters must be finite")


@dataclass
class SequenceDataset:
    """Normalized (sequence, target) pairs for one attribute and target year."""

    inputs: np.ndarray  # (B, T), normalized
    targets: np.ndarray  # (B,), normalized
    bounds: tuple[float, float]
    region_ids: tuple[str, ...]
    attribute: str
    target_year: int

    def denormalized_targets(self) -> np.ndarray:
        lo, hi = self.bounds
        return lo + self.targets * (hi - lo)


def _normalize(values: np.ndarray, bounds: tuple[float, float]) -> np.ndarray:
    lo, hi = bounds
    if hi > lo:
        return (values - lo) / (hi - lo)
    # constant attribute: map everything to the midpoint; denormalization
    # collapses back to the constant regardless
    return np.full_like(values, 0.5)


def make_sequences(
    regions: Mapping[str, SubRegion],
    attribute: str,
    target_year: int,
    bounds: tuple[float, float] | None = None,
) -> SequenceDataset:
    """One (sequence, target) pair per sub-region, normalized to [0, 1].

    The sequence covers every year from the earliest year present anywhere
    up to (target_year - 1); the target is the attribute value at
    target_year. A sub-region missing any required year raises DataGapError.
    When ``bounds`` is None they are computed from these pairs (training
    use); pass the training bounds when building validation/test pairs.
    """
    ids = sorted(regions)
    if not ids:
        raise ValueError("no sub-regions given")
    start_year = min(min(regions[i].weather[attribute]) for i in ids)
    if target_year <= start_year:
        raise ValueError(f"target year {target_year} leaves no input years")
    years = list(range(start_year, target_year))

    rows = []
    targets = []
    for rid in ids:
        series = regions[rid].weather[attribute]
        for y in years + [target_year]:
            if y not in series:
                raise DataGapError(
                    f"sub-region {rid!r}: missing year {y} for attribute {attribute!r}"
                )
        rows.append([series[y] for y in years])
        targets.append(series[target_year])

    inputs = np.asarray(rows, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if bounds is None:
        lo = float(min(inputs.min(), targets.min()))
        hi = float(max(inputs.max(), targets.max()))
        bounds = (lo, hi)
    return SequenceDataset(
        inputs=_normalize(inputs, bounds),
        targets=_normalize(targets, bounds),
        bounds=bounds,
        region_ids=tuple(ids),
        attribute=attribute,
        target_year=target_year,
    )


def init_model(hidden_size: int, bounds: tuple[float, float], seed: int) -> SequenceModel:
    """Seeded uniform [-0.1, 0.1] parameters; forget-gate bias starts at 1."""
    rng = np.random.default_rng(seed)
    h = hidden_size
    wx = rng.uniform(-0.1, 0.1, 4 * h)
    wh = rng.uniform(-0.1, 0.1, (4 * h, h))
    wy = rng.uniform(-0.1, 0.1, h)
    b = np.zeros(4 * h)
    b[h : 2 * h] = 1.0
    return SequenceModel(
        hidden_size=h, wx=wx, wh=wh, b=b, wy=wy, by=0.0, bounds=bounds
    )


def train(dataset: SequenceDataset, config: TrainConfig) -> tuple[SequenceModel, list[float]]:
    """Full-batch gradient descent on MSE; returns (model, per-epoch losses)."""
    if dataset.inputs.shape[0] < 1:
        raise ValueError("need at least one training pair")
    model = init_model(config.hidden_size, dataset.bounds, config.seed)
    x = np.ascontiguousarray(dataset.inputs)
    y = np.ascontiguousarray(dataset.targets)
    losses = []
    lr = config.learning_rate
    for epoch in range(config.epochs):
        loss, dwx, dwh, db, dwy, dby = kernels.lstm_grads(
            model.wx, model.wh, model.b, model.wy, model.by, x, y
        )
        if not math.isfinite(loss):
            raise DivergenceError(f"non-finite training loss at epoch {epoch}")
        losses.append(loss)
        model.wx -= lr * dwx
        model.wh -= lr * dwh
        model.b -= lr * db
        model.wy -= lr * dwy
        model.by -= lr * dby
    return model, losses


def _forward(model: SequenceModel, seq: np.ndarray) -> float:
    """Run one normalized sequence through the cell; returns the normalized prediction."""
    hs = model.hidden_size
    h = np.zeros(hs)
    c = np.zeros(hs)
    for xv in seq:
        z = model.wx * xv + model.wh @ h + model.b
        i = 1.0 / (1.0 + np.exp(-z[:hs]))
        f = 1.0 / (1.0 + np.exp(-z[hs : 2 * hs]))
        g = np.tanh(z[2 * hs : 3 * hs])
        o = 1.0 / (1.0 + np.exp(-z[3 * hs :]))
        c = f * c + i * g
        h = o * np.tanh(c)
    return float(h @ model.wy + model.by)


def predict_next(model: SequenceModel, sequence: Sequence[float]) -> float:
    """De-normalized prediction for the value following the given series."""
    seq = np.asarray(sequence, dtype=np.float64)
    if seq.ndim != 1 or seq.size == 0:
        raise ValueError("sequence must be a non-empty 1-d series")
    if not np.all(np.isfinite(seq)):
        raise ValueError("sequence contains non-finite values")
    lo, hi = model.bounds
    pred = _forward(model, _normalize(seq, model.bounds))
    return lo + pred * (hi - lo)


def evaluate_nrmse(model: SequenceModel, dataset: SequenceDataset) -> float:
    """N-RMSE of de-normalized predictions against de-normalized targets."""
    lo, hi = model.bounds
    preds = np.array([_forward(model, row) for row in dataset.inputs])
    preds = lo + preds * (hi - lo)
    actual = lo + dataset.targets * (hi - lo)
    return n_rmse(actual, preds)


def rmse(actual: Sequence[float], predicted: Sequence[float]) -> float:
    """Root mean square error over paired values."""
    a = np.asarray(actual, dtype=np.float64)
    p = np.asarray(predicted, dtype=np.float64)
    if a.shape != p.shape or a.size == 0:
        raise ValueError("actual and predicted must have equal non-zero length")
    return float(np.sqrt(np.mean((a - p) ** 2)))


def n_rmse(actual: Sequence[float], predicted: Sequence[float]) -> float:
    """RMSE as a percentage of the range of the actual values."""
    a = np.asarray(actual, dtype=np.float64)
    span = float(a.max() - a.min()) if a.size else 0.0
    if span <= 0:
        raise DegenerateRangeError("n_rmse undefined: actual values have zero range")
    return rmse(actual, predicted) / span * 100.0


def save_model(model: SequenceModel, path: str | Path) -> None:
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "hidden_size": model.hidden_size,
        "bounds": list(model.bounds),
        "arrays": {
            "wx": model.wx.tolist(),
            "wh": model.wh.tolist(),
            "b": model.b.tolist(),
            "wy": model.wy.tolist(),
            "by": model.by,
        },
    }
    Path(path).write_text(json.dumps(doc, sort_keys=True), encoding="utf-8")


def load_model(path: str | Path) -> SequenceModel:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError(f"{path}: not a sequence model document")
    if doc.get("version") != MODEL_VERSION:
        raise ValueError(f"{path}: unsupported model version {doc.get('version')}")
    arrays = doc["arrays"]
    return SequenceModel(
        hidden_size=int(doc["hidden_size"]),
        wx=np.asarray(arrays["wx"], dtype=np.float64),
        wh=np.asarray(arrays["wh"], dtype=np.float64),
        b=np.asarray(arrays["b"], dtype=np.float64),
        wy=np.asarray(arrays["wy"], dtype=np.float64),
        by=float(arrays["by"]),
        bounds=(float(doc["bounds"][0]), float(doc["bounds"][1])),
    )
