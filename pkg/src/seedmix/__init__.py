"""Seed-variety planning: forecasting, yield distributions, mix optimization,
and spatial cohesion, exposed as a library, CLI, and HTTP service."""

__version__ = "0.1.0"

from .datagen import GenConfig, generate, generate_with_truth
from .domain import (
    Catalog,
    ExperimentRecord,
    SubRegion,
    load_catalog,
    load_experiment_dataset,
    load_region_dataset,
    split_dataset,
    write_catalog,
)
from .optimizer import PortfolioSolution, VarietyStats
from .pipeline import PipelineConfig, SolutionAtlas, build_atlas

__all__ = [
    "Catalog",
    "ExperimentRecord",
    "GenConfig",
    "PipelineConfig",
    "PortfolioSolution",
    "SolutionAtlas",
    "SubRegion",
    "VarietyStats",
    "build_atlas",
    "generate",
    "generate_with_truth",
    "load_catalog",
    "load_experiment_dataset",
    "load_region_dataset",
    "split_dataset",
    "write_catalog",
]
