#!/usr/bin/env python3
"""Builds the two atlas fixtures the UI tests serve.

atlas_main.json  — a real 50-sub-region pipeline run (round-trip and
                   fidelity tests).
atlas_highvar.json — a handcrafted document whose only sub-region has no
                   feasible solution below tau 0.5, exercising the
                   dark-grey rendering path at tau 0.1.
"""

import argparse
import json
from pathlib import Path

from seedmix import datagen, pipeline
from seedmix.datagen import GenConfig
from seedmix.optimizer import TAU_GRID, PortfolioSolution
from seedmix.pipeline import ATLAS_FORMAT, ATLAS_VERSION, PipelineConfig, tau_key


def build_main(out: Path) -> None:
    catalog = datagen.generate(
        GenConfig(n_subregions=50, n_varieties=8, years=(2000, 2009), seed=33,
                  noise_scale=0.05)
    )
    config = PipelineConfig(top_k=6, bins=10, n_trees=30, epochs=150, seed=9)
    atlas = pipeline.build_atlas(catalog, config)
    atlas.save(out)
    print(f"wrote {out} ({atlas.doc['summary']['solved']} solved)")


def build_highvar(out: Path) -> None:
    risky = PortfolioSolution(
        entries=(("V0001", 1.0),), tau=0.5, expected_yield=42.5,
        variability=0.5, sd=1.25, offset_pct=1.25 / 42.5 * 100.0,
    )
    solutions = {}
    sc = {}
    for tau in TAU_GRID:
        if tau >= 0.5:
            doc = risky.to_json()
            doc["tau"] = tau
            solutions[tau_key(tau)] = doc
            sc[tau_key(tau)] = None  # single sub-region: no neighbors
        else:
            solutions[tau_key(tau)] = None
            sc[tau_key(tau)] = None
    doc = {
        "format": ATLAS_FORMAT,
        "version": ATLAS_VERSION,
        "config": {"top_k": 1, "divisor_entries": False},
        "weather_attributes": ["temperature", "precipitation", "solar_radiation"],
        "soil_attributes": ["soil_ph", "soil_organic_matter", "soil_cec"],
        "varieties": ["V0001"],
        "years": [2000, 2001],
        "forecast_year": 2002,
        "tau_grid": list(TAU_GRID),
        "bins": {"r": 2, "lo": 0.0, "hi": 85.0, "edges": [0.0, 42.5, 85.0]},
        "forecast_metrics": {},
        "forest_metrics": {},
        "topk_counts": {"V0001": 1},
        "subregions": {
            "R0001": {
                "lat": 40.0,
                "lon": -95.0,
                "soil": {"soil_ph": 6.5, "soil_organic_matter": 3.0, "soil_cec": 12.0},
                "weather": {
                    "temperature": {"2000": 11.0, "2001": 11.2},
                    "precipitation": {"2000": 610.0, "2001": 622.0},
                    "solar_radiation": {"2000": 5100.0, "2001": 5080.0},
                },
                "forecast": {"temperature": 11.4, "precipitation": 634.0,
                             "solar_radiation": 5060.0},
                "stats": {"V0001": {"e": 42.5, "var": 361.0}},
                "top_k": [{
                    "variety_id": "V0001", "e": 42.5, "var": 361.0,
                    "norm_e": 0.0, "norm_var": 0.5, "score": 0.5,
                    "distribution": [0.5, 0.5],
                }],
                "solutions": solutions,
                "default": dict(risky.to_json(), tau=1.0),
                "sc": sc,
                "neighbors": [],
            }
        },
        "summary": {
            "subregions": 1, "solved": 1, "average_yield": 42.5,
            "average_sd": 1.25, "average_offset_pct": 1.25 / 42.5 * 100.0,
        },
    }
    pipeline.SolutionAtlas(doc).save(out)
    print(f"wrote {out}")


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default=".fixtures")
    ns = parser.parse_args()
    out = Path(ns.out)
    out.mkdir(parents=True, exist_ok=True)
    main_path = out / "atlas_main.json"
    highvar_path = out / "atlas_highvar.json"
    if not main_path.exists():
        build_main(main_path)
    if not highvar_path.exists():
        build_highvar(highvar_path)


if __name__ == "__main__":
    main()
