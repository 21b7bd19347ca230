"""Seeded synthetic region + experiment datasets with known ground truth.

Sub-region centroids sit on a 0.5-degree grid so the default 50-mile
neighborhoods are non-trivial. Each weather attribute is a per-sub-region
base (smooth over the grid) plus a global linear year trend plus bounded
uniform noise whose amplitude is noise_scale times the magnitude of the
temporal signal (trend times series length). Soil attributes are static.

Every experiment's yield follows a variety-specific quadratic response with
its optimum somewhere in normalized condition space, so different
sub-regions genuinely prefer different varieties. The latent response
parameters are returned alongside the catalog so tests can compare
predictions against ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import (
    Catalog,
    ExperimentRecord,
    SOIL_ATTRIBUTES,
    SubRegion,
    WEATHER_ATTRIBUTES,
)

GRID_ORIGIN = (38.0, -98.0)
GRID_STEP_DEG = 0.5
PEAK_YIELD_RANGE = (45.0, 75.0)
YIELD_NOISE_SCALE = 60.0  # bushels/acre reference magnitude for yield noise

_TRENDS = {"temperature": 0.06, "precipitation": 4.0, "solar_radiation": -12.0}
_BASE_JITTER = {"temperature": 0.5, "precipitation": 20.0, "solar_radiation": 40.0}


@dataclass(frozen=True)
class GenConfig:
    n_subregions: int = 50
    n_varieties: int = 20
    years: tuple[int, int] = (2000, 2015)
    seed: int = 0
    noise_scale: float = 0.05
    years_per_pair: int = 3  # experiment years sampled per (sub-region, variety)

    def __post_init__(self):
        if self.n_subregions < 1 or self.n_varieties < 1:
            raise ValueError("counts must be >= 1")
        if self.years_per_pair < 1:
            raise ValueError("years_per_pair must be >= 1")
        if self.years[1] - self.years[0] + 1 < 3:
            raise ValueError("year range must span at least 3 years")
        if self.noise_scale < 0:
            raise ValueError("noise_scale must be >= 0")


@dataclass
class LatentTruth:
    """The generator's hidden structure, for oracle-style tests."""

    region_ids: tuple[str, ...]
    variety_codes: tuple[str, ...]
    weather_base: dict[str, np.ndarray]  # attr -> per-region base value
    weather_trend: dict[str, float]
    condition_ranges: dict[str, tuple[float, float]]  # all 6 condition attrs
    optima: np.ndarray  # (n_varieties, 6) in normalized condition space
    peaks: np.ndarray  # (n_varieties,)
    curvature: np.ndarray  # (n_varieties, 6)

    def noiseless_weather(self, region_index: int, attribute: str, year: int, start_year: int) -> float:
        base = self.weather_base[attribute][region_index]
        return float(base + self.weather_trend[attribute] * (year - start_year))

    def normalize_conditions(self, conditions: np.ndarray) -> np.ndarray:
        names = WEATHER_ATTRIBUTES + SOIL_ATTRIBUTES
        z = np.empty(6)
        for d, name in enumerate(names):
            lo, hi = self.condition_ranges[name]
            z[d] = (conditions[d] - lo) / max(hi - lo, 1e-9)
        return z

    def noiseless_yield(self, variety_index: int, conditions: np.ndarray) -> float:
        z = self.normalize_conditions(np.asarray(conditions, dtype=np.float64))
        penalty = float(self.curvature[variety_index] @ (z - self.optima[variety_index]) ** 2)
        return float(self.peaks[variety_index] * max(0.0, 1.0 - penalty))


def _grid_centroids(n: int) -> tuple[np.ndarray, np.ndarray]:
    rows = int(np.ceil(np.sqrt(n)))
    cols = int(np.ceil(n / rows))
    lat0, lon0 = GRID_ORIGIN
    lats = np.empty(n)
    lons = np.empty(n)
    for i in range(n):
        r, c = divmod(i, cols)
        lats[i] = lat0 + r * GRID_STEP_DEG
        lons[i] = lon0 + c * GRID_STEP_DEG
    return lats, lons


def generate_with_truth(config: GenConfig) -> tuple[Catalog, LatentTruth]:
    rng = np.random.default_rng(config.seed)
    n = config.n_subregions
    y0, y1 = config.years
    years = list(range(y0, y1 + 1))
    n_years = len(years)

    region_ids = tuple(f"R{i + 1:04d}" for i in range(n))
    variety_codes = tuple(f"V{i + 1:04d}" for i in range(config.n_varieties))

    lats, lons = _grid_centroids(n)
    latf = (lats - lats.min()) / max(lats.max() - lats.min(), 1e-9)
    lonf = (lons - lons.min()) / max(lons.max() - lons.min(), 1e-9)

    base = {
        "temperature": 11.0 + 10.0 * latf + 2.0 * lonf,
        "precipitation": 600.0 + 450.0 * lonf + 100.0 * latf,
        "solar_radiation": 5700.0 - 900.0 * latf,
    }
    for attr in WEATHER_ATTRIBUTES:
        j = _BASE_JITTER[attr]
        base[attr] = base[attr] + rng.uniform(-j, j, n)

    soil = {
        "soil_ph": 5.6 + 1.6 * latf + rng.uniform(-0.1, 0.1, n),
        "soil_organic_matter": 1.5 + 3.5 * lonf + rng.uniform(-0.15, 0.15, n),
        "soil_cec": 9.0 + 12.0 * latf * lonf + rng.uniform(-0.4, 0.4, n),
    }

    weather_values: dict[str, np.ndarray] = {}
    for attr in WEATHER_ATTRIBUTES:
        trend = _TRENDS[attr]
        amplitude = config.noise_scale * abs(trend) * (n_years - 1)
        noise = rng.uniform(-amplitude, amplitude, (n, n_years)) if amplitude > 0 else 0.0
        steps = np.arange(n_years)
        weather_values[attr] = base[attr][:, None] + trend * steps[None, :] + noise

    condition_ranges: dict[str, tuple[float, float]] = {}
    for attr in WEATHER_ATTRIBUTES:
        condition_ranges[attr] = (
            float(weather_values[attr].min()),
            float(weather_values[attr].max()),
        )
    for attr in SOIL_ATTRIBUTES:
        condition_ranges[attr] = (float(soil[attr].min()), float(soil[attr].max()))

    optima = rng.uniform(0.15, 0.85, (config.n_varieties, 6))
    peaks = rng.uniform(*PEAK_YIELD_RANGE, config.n_varieties)
    curvature = rng.uniform(0.2, 0.5, (config.n_varieties, 6))

    truth = LatentTruth(
        region_ids=region_ids,
        variety_codes=variety_codes,
        weather_base=base,
        weather_trend=dict(_TRENDS),
        condition_ranges=condition_ranges,
        optima=optima,
        peaks=peaks,
        curvature=curvature,
    )

    sub_regions: dict[str, SubRegion] = {}
    for i, rid in enumerate(region_ids):
        sub_regions[rid] = SubRegion(
            id=rid,
            centroid_lat=float(lats[i]),
            centroid_lon=float(lons[i]),
            weather={
                attr: {y: float(weather_values[attr][i, k]) for k, y in enumerate(years)}
                for attr in WEATHER_ATTRIBUTES
            },
            soil={attr: float(soil[attr][i]) for attr in SOIL_ATTRIBUTES},
        )

    experiments: list[ExperimentRecord] = []
    k_years = min(config.years_per_pair, n_years)
    for i, rid in enumerate(region_ids):
        for v, code in enumerate(variety_codes):
            chosen = np.sort(rng.choice(n_years, size=k_years, replace=False))
            for yi in chosen:
                year = years[yi]
                weather = tuple(
                    float(weather_values[attr][i, yi]) for attr in WEATHER_ATTRIBUTES
                )
                soil_vals = tuple(float(soil[attr][i]) for attr in SOIL_ATTRIBUTES)
                conditions = np.array(weather + soil_vals)
                clean = truth.noiseless_yield(v, conditions)
                noise = config.noise_scale * YIELD_NOISE_SCALE * rng.uniform(-1.0, 1.0)
                experiments.append(
                    ExperimentRecord(
                        sub_region=rid,
                        year=int(year),
                        variety=code,
                        weather=weather,
                        soil=soil_vals,
                        yield_value=max(0.0, clean + noise),
                    )
                )

    catalog = Catalog(
        sub_regions=sub_regions,
        experiments=experiments,
        varieties=set(variety_codes),
    )
    return catalog, truth


def generate(config: GenConfig) -> Catalog:
    """Deterministic synthetic catalog; see generate_with_truth for the latent state."""
    return generate_with_truth(config)[0]
