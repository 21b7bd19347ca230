"""End-to-end orchestration producing the solution atlas.

For every sub-region: forecast next-year weather, predict a yield
distribution per variety, keep the top k by score, sweep the variability
thresholds, pick the default solution, and score spatial cohesion against
the neighbors. The finished atlas is a single versioned JSON document, the
immutable product served to the UI; everything below derives from it.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import cohesion, forecast, optimizer, yieldmodel
from .domain import Catalog, SOIL_ATTRIBUTES, split_dataset
from .errors import DegenerateRangeError, NoSolutionError, UnknownCategoryError
from .optimizer import TAU_GRID, PortfolioSolution

ATLAS_FORMAT = "seedmix.atlas"
ATLAS_VERSION = 1

HIST_BINS = 10  # histogram of default-solution weights over (0, 1]


def tau_key(tau: float) -> str:
    return f"{tau:.1f}"


@dataclass
class PipelineConfig:
    top_k: int = 10
    bins: int = 20
    neighbor_miles: float = 50.0
    n_trees: int = 100
    min_leaf: int = 2
    epochs: int = 500
    learning_rate: float = 0.05
    hidden_size: int = 16
    seed: int = 0
    split_ratios: tuple[float, float, float] = (0.7, 0.15, 0.15)
    divisor_entries: bool = False
    threads: int = 1

    def forecast_seed(self, attr_index: int) -> int:
        return self.seed * 1000 + 101 + attr_index

    def forest_seed(self) -> int:
        return self.seed * 1000 + 777


def train_forecast_models(
    catalog: Catalog, config: PipelineConfig
) -> tuple[dict[str, forecast.SequenceModel], dict[str, dict]]:
    """One model per weather attribute, trained on the train split of
    sub-regions with N-RMSE reported on the validation and test splits."""
    _, y_hi = catalog.year_range()
    ids = sorted(catalog.sub_regions)
    train_ids, valid_ids, test_ids = split_dataset(ids, config.split_ratios, config.seed)

    models: dict[str, forecast.SequenceModel] = {}
    metrics: dict[str, dict] = {}
    for i, attr in enumerate(catalog.weather_attribute_names):
        train_regions = {r: catalog.sub_regions[r] for r in train_ids}
        ds_train = forecast.make_sequences(train_regions, attr, y_hi)
        model, _ = forecast.train(
            ds_train,
            forecast.TrainConfig(
                epochs=config.epochs,
                learning_rate=config.learning_rate,
                hidden_size=config.hidden_size,
                seed=config.forecast_seed(i),
            ),
        )
        models[attr] = model
        entry = {"train_nrmse": _safe_nrmse(model, ds_train)}
        for name, split_ids in (("valid", valid_ids), ("test", test_ids)):
            if split_ids:
                ds = forecast.make_sequences(
                    {r: catalog.sub_regions[r] for r in split_ids},
                    attr,
                    y_hi,
                    bounds=ds_train.bounds,
                )
                entry[f"{name}_nrmse"] = _safe_nrmse(model, ds)
            else:
                entry[f"{name}_nrmse"] = None
        metrics[attr] = entry
    return models, metrics


def _safe_nrmse(model, dataset) -> float | None:
    # undefined when the split holds too few regions to span a range
    try:
        return forecast.evaluate_nrmse(model, dataset)
    except DegenerateRangeError:
        return None


def forest_point_nrmse(
    forest: yieldmodel.Forest, records: Sequence
) -> float:
    """N-RMSE of mode-bin midpoints against the observed yields."""
    X = np.stack([forest.schema.encode(r.weather, r.soil, r.variety) for r in records])
    labels = yieldmodel.predict_labels(forest, X)
    mids = forest.scheme.midpoints()
    preds = np.empty(len(records))
    for i in range(len(records)):
        votes = np.bincount(labels[i], minlength=forest.scheme.r)
        preds[i] = mids[int(np.argmax(votes))]
    actual = np.array([r.yield_value for r in records])
    return forecast.n_rmse(actual, preds)


def train_yield_forest(
    catalog: Catalog, config: PipelineConfig
) -> tuple[yieldmodel.Forest, dict]:
    """Forest on the train split of experiments; bins span all history."""
    scheme = yieldmodel.fit_bins(
        [r.yield_value for r in catalog.experiments], config.bins
    )
    schema = yieldmodel.FeatureSchema(
        weather_names=catalog.weather_attribute_names,
        soil_names=catalog.soil_attribute_names,
        varieties=tuple(catalog.sorted_varieties()),
    )
    train, valid, test = split_dataset(
        catalog.experiments, config.split_ratios, config.seed
    )
    forest = yieldmodel.train_forest(
        train,
        scheme,
        n_trees=config.n_trees,
        seed=config.forest_seed(),
        min_leaf=config.min_leaf,
        schema=schema,
    )
    metrics = {
        "oob_accuracy": forest.oob_accuracy,
        "valid_nrmse": _safe_forest_nrmse(forest, valid),
        "test_nrmse": _safe_forest_nrmse(forest, test),
    }
    return forest, metrics


def _safe_forest_nrmse(forest, records) -> float | None:
    if not records:
        return None
    try:
        return forest_point_nrmse(forest, records)
    except DegenerateRangeError:
        return None


def _solve_subregion(args):
    """Distributions, top-k, tau sweep and default for one sub-region."""
    (rid, region, forecast_weather, forest, varieties, config) = args

    soil_vals = [region.soil[a] for a in SOIL_ATTRIBUTES]
    X = np.stack(
        [
            forest.schema.encode(forecast_weather, soil_vals, code)
            for code in varieties
        ]
    )
    probs = yieldmodel.predict_proba(forest, X)
    mids = forest.scheme.midpoints()
    es = probs @ mids
    vars_ = np.array(
        [float(probs[i] @ (mids - es[i]) ** 2) for i in range(len(varieties))]
    )

    stats = optimizer.normalize_stats(
        [(code, float(es[i]), float(vars_[i])) for i, code in enumerate(varieties)]
    )
    k = min(config.top_k, len(stats))
    top = optimizer.top_k(stats, k)
    sweep = optimizer.tau_sweep(top, divisor_entries=config.divisor_entries)
    try:
        default = optimizer.default_solution(sweep)
    except NoSolutionError:
        default = None

    top_json = [
        {
            "variety_id": s.variety,
            "e": s.e,
            "var": s.var,
            "norm_e": s.norm_e,
            "norm_var": s.norm_var,
            "score": optimizer.score(s.norm_e, s.norm_var),
            "distribution": probs[varieties.index(s.variety)].tolist(),
        }
        for s in top
    ]
    return rid, {
        "stats": {code: {"e": float(es[i]), "var": float(vars_[i])} for i, code in enumerate(varieties)},
        "top_k": top_json,
        "sweep": sweep,
        "default": default,
    }


class SolutionAtlas:
    """Thin reader over the atlas JSON document."""

    def __init__(self, doc: dict):
        if doc.get("format") != ATLAS_FORMAT:
            raise ValueError("not an atlas document")
        if doc.get("version") != ATLAS_VERSION:
            raise ValueError(f"unsupported atlas version {doc.get('version')}")
        self.doc = doc

    # -- accessors ---------------------------------------------------------

    @property
    def subregions(self) -> dict:
        return self.doc["subregions"]

    @property
    def varieties(self) -> list[str]:
        return self.doc["varieties"]

    def subregion_ids(self) -> list[str]:
        return sorted(self.doc["subregions"])

    def default_of(self, rid: str) -> PortfolioSolution | None:
        raw = self.doc["subregions"][rid]["default"]
        return None if raw is None else PortfolioSolution.from_json(raw)

    def solution_at(self, rid: str, tau: float) -> PortfolioSolution | None:
        raw = self.doc["subregions"][rid]["solutions"].get(tau_key(tau))
        return None if raw is None else PortfolioSolution.from_json(raw)

    def solutions_at(self, tau: float) -> dict[str, PortfolioSolution | None]:
        return {rid: self.solution_at(rid, tau) for rid in self.subregion_ids()}

    # -- persistence -------------------------------------------------------

    def dumps(self) -> str:
        return json.dumps(self.doc, sort_keys=True, separators=(",", ":"))

    def save(self, path: str | Path) -> None:
        path = Path(path)
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(self.dumps(), encoding="utf-8")
        os.replace(tmp, path)

    @classmethod
    def load(cls, path: str | Path) -> "SolutionAtlas":
        return cls(json.loads(Path(path).read_text(encoding="utf-8")))


def build_atlas(
    catalog: Catalog,
    config: PipelineConfig,
    forecast_models: Mapping[str, forecast.SequenceModel] | None = None,
    forest: yieldmodel.Forest | None = None,
) -> SolutionAtlas:
    """Run the full pipeline and assemble the atlas document."""
    y_lo, y_hi = catalog.year_range()
    forecast_year = y_hi + 1

    forecast_metrics: dict = {}
    if forecast_models is None:
        forecast_models, forecast_metrics = train_forecast_models(catalog, config)

    forest_metrics: dict = {}
    if forest is None:
        forest, forest_metrics = train_yield_forest(catalog, config)

    varieties = catalog.sorted_varieties()
    ids = sorted(catalog.sub_regions)

    forecasts = {
        rid: {
            attr: forecast.predict_next(
                forecast_models[attr], catalog.sub_regions[rid].weather_series(attr)
            )
            for attr in catalog.weather_attribute_names
        }
        for rid in ids
    }

    jobs = [
        (
            rid,
            catalog.sub_regions[rid],
            [forecasts[rid][a] for a in catalog.weather_attribute_names],
            forest,
            varieties,
            config,
        )
        for rid in ids
    ]
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            solved = dict(pool.map(_solve_subregion, jobs))
    else:
        solved = dict(map(_solve_subregion, jobs))

    neighborhoods = {
        rid: cohesion.near(catalog.sub_regions, rid, config.neighbor_miles)
        for rid in ids
    }

    sc_by_tau: dict[float, dict[str, float | None]] = {}
    for tau in TAU_GRID:
        sols = {rid: solved[rid]["sweep"].get(tau) for rid in ids}
        scores: dict[str, float | None] = {}
        for rid in ids:
            sol = sols[rid]
            if sol is None or not neighborhoods[rid].neighbors:
                scores[rid] = None
            else:
                scores[rid] = cohesion.sc_score(
                    sol,
                    neighborhoods[rid],
                    sols,
                    divisor_entries=config.divisor_entries,
                )
        sc_by_tau[tau] = scores

    topk_counts: dict[str, int] = {code: 0 for code in varieties}
    for rid in ids:
        for entry in solved[rid]["top_k"]:
            topk_counts[entry["variety_id"]] += 1

    subregion_docs = {}
    for rid in ids:
        region = catalog.sub_regions[rid]
        res = solved[rid]
        subregion_docs[rid] = {
            "lat": region.centroid_lat,
            "lon": region.centroid_lon,
            "soil": {a: region.soil[a] for a in catalog.soil_attribute_names},
            "weather": {
                a: {str(y): region.weather[a][y] for y in sorted(region.weather[a])}
                for a in catalog.weather_attribute_names
            },
            "forecast": forecasts[rid],
            "stats": res["stats"],
            "top_k": res["top_k"],
            "solutions": {
                tau_key(tau): (
                    res["sweep"][tau].to_json() if tau in res["sweep"] else None
                )
                for tau in TAU_GRID
            },
            "default": None if res["default"] is None else res["default"].to_json(),
            "sc": {tau_key(tau): sc_by_tau[tau][rid] for tau in TAU_GRID},
            "neighbors": list(neighborhoods[rid].neighbors),
        }

    solved_defaults = [
        solved[rid]["default"] for rid in ids if solved[rid]["default"] is not None
    ]
    summary = {
        "subregions": len(ids),
        "solved": len(solved_defaults),
        "average_yield": _mean([s.expected_yield for s in solved_defaults]),
        "average_sd": _mean([s.sd for s in solved_defaults]),
        "average_offset_pct": _mean(
            [s.offset_pct for s in solved_defaults if s.offset_pct is not None]
        ),
    }

    doc = {
        "format": ATLAS_FORMAT,
        "version": ATLAS_VERSION,
        "config": asdict(config),
        "weather_attributes": list(catalog.weather_attribute_names),
        "soil_attributes": list(catalog.soil_attribute_names),
        "varieties": list(varieties),
        "years": [y_lo, y_hi],
        "forecast_year": forecast_year,
        "tau_grid": list(TAU_GRID),
        "bins": {
            "r": forest.scheme.r,
            "lo": forest.scheme.lo,
            "hi": forest.scheme.hi,
            "edges": list(forest.scheme.edges),
        },
        "forecast_metrics": forecast_metrics,
        "forest_metrics": forest_metrics,
        "topk_counts": topk_counts,
        "subregions": subregion_docs,
        "summary": summary,
    }
    return SolutionAtlas(doc)


def _mean(values: Sequence[float]) -> float | None:
    return float(np.mean(values)) if len(values) else None


@dataclass
class VarietyPrevalence:
    """A variety's default-solution weights across all sub-regions."""

    variety: str
    weights: dict[str, float]  # per sub-region, 0.0 where absent
    expected_weight: float  # mean including the zeros
    histogram: list[int] = field(default_factory=list)  # 10 bins over (0, 1]

    @property
    def histogram_edges(self) -> list[float]:
        return [i / HIST_BINS for i in range(HIST_BINS + 1)]


def prevalence_ranking(atlas: SolutionAtlas) -> list[VarietyPrevalence]:
    """Varieties in decreasing order of mean default-solution weight."""
    ids = atlas.subregion_ids()
    defaults = {rid: atlas.default_of(rid) for rid in ids}
    out = []
    for code in atlas.varieties:
        weights = {
            rid: (0.0 if defaults[rid] is None else defaults[rid].weight_of(code))
            for rid in ids
        }
        values = list(weights.values())
        hist = [0] * HIST_BINS
        for w in values:
            if w > 0:
                # epsilon keeps float dust like 0.30000000000000004 in bin (0.2, 0.3]
                hist[min(HIST_BINS - 1, int(np.ceil(w * HIST_BINS - 1e-9)) - 1)] += 1
        out.append(
            VarietyPrevalence(
                variety=code,
                weights=weights,
                expected_weight=float(np.mean(values)) if values else 0.0,
                histogram=hist,
            )
        )
    out.sort(key=lambda p: (-p.expected_weight, p.variety))
    return out


def region_stats(atlas: SolutionAtlas) -> list[optimizer.VarietyStats]:
    """Region-level stats: mean E and Var per variety over all sub-regions,
    min-max normalized across the varieties at region scope."""
    ids = atlas.subregion_ids()
    moments = []
    for code in atlas.varieties:
        es = [atlas.subregions[rid]["stats"][code]["e"] for rid in ids]
        vs = [atlas.subregions[rid]["stats"][code]["var"] for rid in ids]
        moments.append((code, float(np.mean(es)), float(np.mean(vs))))
    return optimizer.normalize_stats(moments)


def common_solution(
    atlas: SolutionAtlas, chosen: Sequence[str], tau: float | None = None
) -> PortfolioSolution | None:
    """One mix over the whole region using exactly the chosen varieties.

    Weights come from the subset LP on region-mean stats. With tau=None the
    full grid is swept and the default-solution rule picks; a given tau
    solves that single threshold. Returns None when infeasible. The region
    yield is the solution's expected yield (averaging per-sub-region
    evaluations of the same weights gives the identical number by
    linearity).
    """
    if not 1 <= len(chosen) <= optimizer.MAX_VARIETIES:
        raise ValueError(f"choose 1..{optimizer.MAX_VARIETIES} varieties")
    if len(set(chosen)) != len(chosen):
        raise ValueError("chosen varieties must be distinct")
    known = set(atlas.varieties)
    for code in chosen:
        if code not in known:
            raise UnknownCategoryError(f"unknown variety {code!r}")

    stats = {s.variety: s for s in region_stats(atlas)}
    subset = [stats[code] for code in sorted(chosen)]
    e = np.array([s.e for s in subset])
    v = np.array([s.norm_var for s in subset])

    sweep: dict[float, PortfolioSolution] = {}
    divisor_entries = bool(atlas.doc["config"].get("divisor_entries", False))
    taus = TAU_GRID if tau is None else (tau,)
    for t in taus:
        w = optimizer.solve_subset(e, v, t)
        if w is None:
            continue
        obj = float(w @ e)
        sd = optimizer.solution_sd(
            w, [s.var for s in subset], divisor_entries=divisor_entries
        )
        sweep[t] = PortfolioSolution(
            entries=tuple((s.variety, float(w[i])) for i, s in enumerate(subset)),
            tau=t,
            expected_yield=obj,
            variability=float(w @ v),
            sd=sd,
            offset_pct=None if obj == 0 else optimizer.solution_offset(sd, obj),
        )
    if not sweep:
        return None
    return optimizer.default_solution(sweep)


def highlight_subregions(
    atlas: SolutionAtlas,
    varieties: Sequence[str],
    weight_range: tuple[float, float] | None = None,
) -> list[str]:
    """Sub-regions whose default solution holds any chosen variety (union),
    optionally restricted to weights inside [lo, hi]."""
    lo, hi = weight_range if weight_range is not None else (0.0, 1.0)
    hits = set()
    for rid in atlas.subregion_ids():
        default = atlas.default_of(rid)
        if default is None:
            continue
        for code in varieties:
            w = default.weight_of(code)
            if w > 0 and lo <= w <= hi:
                hits.add(rid)
                break
    return sorted(hits)


def compare_solutions(
    atlas: SolutionAtlas, chosen: Sequence[str] | None = None
) -> dict:
    """Mean yield and variability summaries for the differentiated atlas
    versus one common mix (top-5 prevalent varieties when not given)."""
    if chosen is None:
        ranked = prevalence_ranking(atlas)
        chosen = [p.variety for p in ranked[: optimizer.MAX_VARIETIES]]
    defaults = [
        atlas.default_of(rid)
        for rid in atlas.subregion_ids()
        if atlas.default_of(rid) is not None
    ]
    diff = {
        "mean_yield": _mean([s.expected_yield for s in defaults]),
        "mean_variability": _mean([s.variability for s in defaults]),
        "mean_sd": _mean([s.sd for s in defaults]),
        "solved_subregions": len(defaults),
    }
    common = common_solution(atlas, chosen)
    common_doc = None
    if common is not None:
        common_doc = {
            "varieties": list(chosen),
            "expected_yield": common.expected_yield,
            "variability": common.variability,
            "sd": common.sd,
            "offset_pct": common.offset_pct,
            "entries": [{"variety_id": c, "weight": w} for c, w in common.entries],
        }
    return {"differentiated": diff, "common": common_doc}
