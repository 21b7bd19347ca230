"""Command-line driver for the full workflow.

Subcommands: gen, train-forecast, train-yield, build-atlas, serve, report.
Progress goes to stderr; machine output (JSON/CSV) goes to files or stdout.
Exit codes: 0 success, 2 usage error, 1 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import datagen, domain, forecast, pipeline, yieldmodel
from .errors import SeedmixError

log = logging.getLogger("seedmix")

CONFIG_KEYS = {
    "data": str,
    "out": str,
    "k": int,
    "bins": int,
    "miles": float,
    "trees": int,
    "min_leaf": int,
    "epochs": int,
    "learning_rate": float,
    "hidden": int,
    "seed": int,
    "threads": int,
    "divisor_entries": lambda s: s.lower() in ("1", "true", "yes"),
}


def parse_config_file(path: str | Path) -> dict:
    """Plain key=value lines; '#' starts a comment; unknown keys rejected."""
    values: dict = {}
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{line_no}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in CONFIG_KEYS:
            raise ValueError(f"{path}:{line_no}: unknown config key {key!r}")
        values[key] = CONFIG_KEYS[key](value)
    return values


def _pipeline_config(ns: argparse.Namespace, file_cfg: dict) -> pipeline.PipelineConfig:
    def pick(flag, key, default):
        if getattr(ns, flag, None) is not None:
            return getattr(ns, flag)
        return file_cfg.get(key, default)

    return pipeline.PipelineConfig(
        top_k=pick("k", "k", 10),
        bins=pick("bins", "bins", 20),
        neighbor_miles=pick("miles", "miles", 50.0),
        n_trees=pick("trees", "trees", 100),
        min_leaf=pick("min_leaf", "min_leaf", 2),
        epochs=pick("epochs", "epochs", 500),
        learning_rate=pick("learning_rate", "learning_rate", 0.05),
        hidden_size=pick("hidden", "hidden", 16),
        seed=pick("seed", "seed", 0),
        divisor_entries=pick("divisor_entries", "divisor_entries", False),
        threads=pick("threads", "threads", 1),
    )


def _years(spec: str) -> tuple[int, int]:
    a, _, b = spec.partition(":")
    return int(a), int(b)


def _write_json(path: Path, doc) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(json.dumps(doc, sort_keys=True, indent=2), encoding="utf-8")
    os.replace(tmp, path)


def cmd_gen(ns: argparse.Namespace) -> int:
    config = datagen.GenConfig(
        n_subregions=ns.subregions,
        n_varieties=ns.varieties,
        years=_years(ns.years),
        seed=ns.seed,
        noise_scale=ns.noise,
        years_per_pair=ns.years_per_pair,
    )
    catalog = datagen.generate(config)
    out = Path(ns.out)
    domain.write_catalog(catalog, out)
    log.info(
        "wrote %d sub-regions, %d experiments to %s",
        len(catalog.sub_regions),
        len(catalog.experiments),
        out,
    )
    return 0


def cmd_train_forecast(ns: argparse.Namespace) -> int:
    catalog = domain.load_catalog(ns.data)
    config = pipeline.PipelineConfig(
        epochs=ns.epochs, learning_rate=ns.lr, hidden_size=ns.hidden, seed=ns.seed
    )
    models, metrics = pipeline.train_forecast_models(catalog, config)
    out = Path(ns.out)
    out.mkdir(parents=True, exist_ok=True)
    for attr, model in models.items():
        forecast.save_model(model, out / f"{attr}.json")
    _write_json(out / "metrics.json", metrics)
    for attr, m in metrics.items():
        log.info(
            "%s: valid N-RMSE %s%%, test N-RMSE %s%%",
            attr,
            _fmt_pct(m["valid_nrmse"]),
            _fmt_pct(m["test_nrmse"]),
        )
    json.dump(metrics, sys.stdout, sort_keys=True)
    print()
    return 0


def cmd_train_yield(ns: argparse.Namespace) -> int:
    catalog = domain.load_catalog(ns.data)
    config = pipeline.PipelineConfig(
        n_trees=ns.trees, bins=ns.bins, min_leaf=ns.min_leaf, seed=ns.seed
    )
    forest, metrics = pipeline.train_yield_forest(catalog, config)
    _write_json(Path(ns.out), yieldmodel.forest_to_doc(forest))
    log.info(
        "forest: OOB accuracy %s, valid N-RMSE %s%%, test N-RMSE %s%%",
        metrics["oob_accuracy"],
        _fmt_pct(metrics["valid_nrmse"]),
        _fmt_pct(metrics["test_nrmse"]),
    )
    json.dump(metrics, sys.stdout, sort_keys=True)
    print()
    return 0


def _fmt_pct(value) -> str:
    return "n/a" if value is None else f"{value:.2f}"


def cmd_build_atlas(ns: argparse.Namespace) -> int:
    file_cfg = parse_config_file(ns.config) if ns.config else {}
    data_dir = ns.data or file_cfg.get("data")
    out_path = ns.out or file_cfg.get("out")
    if not data_dir:
        log.error("no data directory given (use --data or a config file)")
        return 2
    if not out_path:
        log.error("no output path given (use --out or a config file)")
        return 2
    config = _pipeline_config(ns, file_cfg)
    catalog = domain.load_catalog(data_dir)
    log.info(
        "building atlas: %d sub-regions, %d varieties, %d experiments",
        len(catalog.sub_regions),
        len(catalog.varieties),
        len(catalog.experiments),
    )
    forest = None
    if ns.forest:
        forest = yieldmodel.forest_from_doc(
            json.loads(Path(ns.forest).read_text(encoding="utf-8"))
        )
    models = None
    if ns.forecast_models:
        models = {
            attr: forecast.load_model(Path(ns.forecast_models) / f"{attr}.json")
            for attr in catalog.weather_attribute_names
        }
    atlas = pipeline.build_atlas(catalog, config, forecast_models=models, forest=forest)
    atlas.save(out_path)
    summary = atlas.doc["summary"]
    log.info(
        "atlas written to %s (%d/%d sub-regions solved)",
        out_path,
        summary["solved"],
        summary["subregions"],
    )
    return 0


def cmd_serve(ns: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    host, _, port = ns.bind.partition(":")
    app = create_app(ns.atlas, static_dir=ns.static)
    log.info("serving atlas %s on %s", ns.atlas, ns.bind)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8000), log_level="warning")
    return 0


def cmd_report(ns: argparse.Namespace) -> int:
    atlas = pipeline.SolutionAtlas.load(ns.atlas)
    summary = atlas.doc["summary"]
    chosen = ns.common.split(",") if ns.common else None
    comparison = pipeline.compare_solutions(atlas, chosen)
    report = {
        "summary": summary,
        "comparison": comparison,
        "prevalence": [
            {"variety_id": p.variety, "expected_weight": p.expected_weight}
            for p in pipeline.prevalence_ranking(atlas)
        ],
    }
    log.info(
        "region: average yield %.3f, average S.D. %.3f, average offset %.3f%%",
        summary["average_yield"] or float("nan"),
        summary["average_sd"] or float("nan"),
        summary["average_offset_pct"] or float("nan"),
    )
    json.dump(report, sys.stdout, sort_keys=True, indent=2)
    print()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seedmix")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic dataset")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--subregions", type=int, default=50)
    p.add_argument("--varieties", type=int, default=20)
    p.add_argument("--years", default="2000:2015", help="inclusive range, e.g. 2000:2015")
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--years-per-pair", type=int, default=3, dest="years_per_pair")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("train-forecast", help="train per-attribute forecast models")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True, help="output directory for model files")
    p.add_argument("--epochs", type=int, default=500)
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--hidden", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_train_forecast)

    p = sub.add_parser("train-yield", help="train the yield-distribution forest")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True, help="output forest JSON path")
    p.add_argument("--trees", type=int, default=100)
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--min-leaf", type=int, default=2, dest="min_leaf")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_train_yield)

    p = sub.add_parser("build-atlas", help="run the full pipeline into an atlas")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--data")
    p.add_argument("--out")
    p.add_argument("--k", type=int)
    p.add_argument("--bins", type=int)
    p.add_argument("--miles", type=float)
    p.add_argument("--trees", type=int)
    p.add_argument("--min-leaf", type=int, dest="min_leaf")
    p.add_argument("--epochs", type=int)
    p.add_argument("--learning-rate", type=float, dest="learning_rate")
    p.add_argument("--hidden", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--divisor-entries", action="store_const", const=True,
                   dest="divisor_entries", default=None)
    p.add_argument("--forest", help="pre-trained forest JSON")
    p.add_argument("--forecast-models", dest="forecast_models",
                   help="directory of pre-trained forecast models")
    p.set_defaults(fn=cmd_build_atlas)

    p = sub.add_parser("serve", help="serve an atlas over HTTP")
    p.add_argument("--atlas", required=True)
    p.add_argument("--bind", default="127.0.0.1:8000")
    p.add_argument("--static", help="directory with the UI bundle")
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("report", help="print atlas summary and comparison")
    p.add_argument("--atlas", required=True)
    p.add_argument("--common", help="comma-separated varieties for the common mix")
    p.set_defaults(fn=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(message)s"
    )
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return ns.fn(ns)
    except (SeedmixError, OSError, ValueError) as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
