import pytest

from seedmix import datagen, pipeline
from seedmix.datagen import GenConfig
from seedmix.pipeline import PipelineConfig


@pytest.fixture(scope="session")
def small_catalog():
    return datagen.generate(
        GenConfig(n_subregions=16, n_varieties=6, years=(2000, 2009), seed=21,
                  noise_scale=0.05)
    )


@pytest.fixture(scope="session")
def small_config():
    return PipelineConfig(
        top_k=5, bins=10, n_trees=30, epochs=150, seed=3, neighbor_miles=50.0
    )


@pytest.fixture(scope="session")
def small_atlas(small_catalog, small_config):
    """One real end-to-end pipeline run shared across the suite."""
    return pipeline.build_atlas(small_catalog, small_config)
