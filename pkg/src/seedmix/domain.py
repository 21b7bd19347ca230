"""Core domain types and flat-file ingestion for the two dataset families.

The region dataset carries one row per (sub-region, year) with the three
weather attributes plus the three static soil attributes; the experiment
dataset carries one historical trial per row. Both schemas are fixed (see
``REGION_COLUMNS`` / ``EXPERIMENT_COLUMNS``) with UTF-8 encoding, a single
header row and ``.`` as the decimal separator.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    ConflictError,
    CsvParseError,
    DataGapError,
    DataValidationError,
    IntegrityError,
    SchemaError,
)

WEATHER_ATTRIBUTES = ("temperature", "precipitation", "solar_radiation")
SOIL_ATTRIBUTES = ("soil_ph", "soil_organic_matter", "soil_cec")

REGION_COLUMNS = (
    "sub_region_id",
    "lat",
    "lon",
    "year",
    *WEATHER_ATTRIBUTES,
    *SOIL_ATTRIBUTES,
)
EXPERIMENT_COLUMNS = (
    "sub_region_id",
    "year",
    "variety_id",
    *WEATHER_ATTRIBUTES,
    *SOIL_ATTRIBUTES,
    "yield",
)

# A variety is an opaque string code like "V156774".
VarietyId = str


@dataclass(frozen=True)
class SubRegion:
    """A geolocated planning unit with per-year weather and static soil."""

    id: str
    centroid_lat: float
    centroid_lon: float
    weather: Mapping[str, Mapping[int, float]]  # attribute -> year -> value
    soil: Mapping[str, float]

    def __post_init__(self):
        if not -90.0 <= self.centroid_lat <= 90.0:
            raise DataValidationError(
                f"sub-region {self.id!r}: lat out of range ({self.centroid_lat})"
            )
        if not -180.0 <= self.centroid_lon <= 180.0:
            raise DataValidationError(
                f"sub-region {self.id!r}: lon out of range ({self.centroid_lon})"
            )

    def years(self) -> list[int]:
        """Sorted years covered by the weather series (same for all attributes)."""
        any_attr = next(iter(self.weather.values()), {})
        return sorted(any_attr)

    def weather_series(self, attribute: str) -> np.ndarray:
        """Values of one weather attribute in ascending year order."""
        series = self.weather[attribute]
        return np.array([series[y] for y in sorted(series)], dtype=np.float64)

    def validate_contiguous(self) -> None:
        """Check every weather attribute covers one gap-free year range."""
        for attr, series in self.weather.items():
            years = sorted(series)
            if not years:
                raise DataValidationError(
                    f"sub-region {self.id!r}: no data for attribute {attr!r}"
                )
            for expected, got in zip(range(years[0], years[-1] + 1), years):
                if expected != got:
                    raise DataGapError(
                        f"sub-region {self.id!r}: missing year {expected} "
                        f"for attribute {attr!r}"
                    )


@dataclass(frozen=True)
class ExperimentRecord:
    """One historical trial of a variety under observed conditions."""

    sub_region: str
    year: int
    variety: VarietyId
    weather: tuple[float, float, float]
    soil: tuple[float, float, float]
    yield_value: float

    def __post_init__(self):
        if not math.isfinite(self.yield_value) or self.yield_value < 0:
            raise DataValidationError(
                f"experiment ({self.sub_region!r}, {self.year}, {self.variety!r}): "
                f"yield must be finite and non-negative, got {self.yield_value}"
            )

    def conditions(self) -> np.ndarray:
        """The six condition values, weather first, as a float vector."""
        return np.array(self.weather + self.soil, dtype=np.float64)


@dataclass
class Catalog:
    """Loaded datasets plus the attribute-name conventions they follow."""

    sub_regions: dict[str, SubRegion]
    experiments: list[ExperimentRecord]
    varieties: set[VarietyId] = field(default_factory=set)
    weather_attribute_names: tuple[str, ...] = WEATHER_ATTRIBUTES
    soil_attribute_names: tuple[str, ...] = SOIL_ATTRIBUTES

    def __post_init__(self):
        if not self.varieties:
            self.varieties = {r.variety for r in self.experiments}
        missing = {r.variety for r in self.experiments} - self.varieties
        if missing:
            raise DataValidationError(f"experiments use unlisted varieties: {sorted(missing)}")
        if len(self.weather_attribute_names) != 3 or len(self.soil_attribute_names) != 3:
            raise DataValidationError("attribute name lists must have length 3")

    def sorted_varieties(self) -> list[VarietyId]:
        return sorted(self.varieties)

    def year_range(self) -> tuple[int, int]:
        """(min, max) year over all sub-region weather series."""
        lo, hi = None, None
        for region in self.sub_regions.values():
            years = region.years()
            if not years:
                continue
            lo = years[0] if lo is None else min(lo, years[0])
            hi = years[-1] if hi is None else max(hi, years[-1])
        if lo is None:
            raise DataValidationError("catalog has no weather data")
        return lo, hi


def _require_columns(fieldnames: Sequence[str] | None, required: Sequence[str], path) -> None:
    present = set(fieldnames or ())
    for col in required:
        if col not in present:
            raise SchemaError(f"{path}: missing column {col!r}")


def _parse_float(row: Mapping[str, str], col: str, row_num: int, path) -> float:
    raw = row[col]
    try:
        return float(raw)
    except (TypeError, ValueError):
        raise CsvParseError(
            f"{path}: row {row_num}: column {col!r} is not numeric: {raw!r}"
        ) from None


def _parse_int(row: Mapping[str, str], col: str, row_num: int, path) -> int:
    raw = row[col]
    try:
        return int(raw)
    except (TypeError, ValueError):
        raise CsvParseError(
            f"{path}: row {row_num}: column {col!r} is not an integer: {raw!r}"
        ) from None


def load_region_dataset(path: str | Path) -> dict[str, SubRegion]:
    """Load region.csv, merging all rows of an id into year-indexed series.

    Raises SchemaError for a missing column, CsvParseError with the row
    number for a bad cell, ConflictError for duplicate (id, year) rows or for
    an id whose lat/lon/soil differ between rows, and DataGapError if a
    merged series has a hole in its year range.
    """
    path = Path(path)
    # id -> (lat, lon, {attr: {year: value}}, {soil: value})
    staged: dict[str, tuple[float, float, dict, dict]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        _require_columns(reader.fieldnames, REGION_COLUMNS, path)
        for row_num, row in enumerate(reader, start=2):  # header is row 1
            rid = row["sub_region_id"]
            lat = _parse_float(row, "lat", row_num, path)
            lon = _parse_float(row, "lon", row_num, path)
            year = _parse_int(row, "year", row_num, path)
            weather = {a: _parse_float(row, a, row_num, path) for a in WEATHER_ATTRIBUTES}
            soil = {a: _parse_float(row, a, row_num, path) for a in SOIL_ATTRIBUTES}

            if rid not in staged:
                staged[rid] = (lat, lon, {a: {} for a in WEATHER_ATTRIBUTES}, soil)
            known_lat, known_lon, series, known_soil = staged[rid]
            if (known_lat, known_lon) != (lat, lon):
                raise ConflictError(
                    f"{path}: row {row_num}: sub-region {rid!r} has conflicting centroid"
                )
            if known_soil != soil:
                raise ConflictError(
                    f"{path}: row {row_num}: sub-region {rid!r} has conflicting soil values"
                )
            for attr in WEATHER_ATTRIBUTES:
                if year in series[attr]:
                    raise ConflictError(
                        f"{path}: row {row_num}: duplicate ({rid!r}, {year}, {attr!r})"
                    )
                series[attr][year] = weather[attr]

    regions: dict[str, SubRegion] = {}
    for rid, (lat, lon, series, soil) in staged.items():
        region = SubRegion(id=rid, centroid_lat=lat, centroid_lon=lon, weather=series, soil=soil)
        region.validate_contiguous()
        regions[rid] = region
    return regions


def load_experiment_dataset(
    path: str | Path, regions: Mapping[str, SubRegion]
) -> list[ExperimentRecord]:
    """Load experiments.csv in file order, checking referential integrity."""
    path = Path(path)
    records: list[ExperimentRecord] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        _require_columns(reader.fieldnames, EXPERIMENT_COLUMNS, path)
        for row_num, row in enumerate(reader, start=2):
            rid = row["sub_region_id"]
            if rid not in regions:
                raise IntegrityError(
                    f"{path}: row {row_num}: unknown sub-region {rid!r}"
                )
            variety = row["variety_id"]
            if not variety:
                raise DataValidationError(f"{path}: row {row_num}: empty variety_id")
            records.append(
                ExperimentRecord(
                    sub_region=rid,
                    year=_parse_int(row, "year", row_num, path),
                    variety=variety,
                    weather=tuple(
                        _parse_float(row, a, row_num, path) for a in WEATHER_ATTRIBUTES
                    ),
                    soil=tuple(
                        _parse_float(row, a, row_num, path) for a in SOIL_ATTRIBUTES
                    ),
                    yield_value=_parse_float(row, "yield", row_num, path),
                )
            )
    return records


def load_catalog(data_dir: str | Path) -> Catalog:
    """Load region.csv + experiments.csv from a directory."""
    data_dir = Path(data_dir)
    regions = load_region_dataset(data_dir / "region.csv")
    experiments = load_experiment_dataset(data_dir / "experiments.csv", regions)
    return Catalog(sub_regions=regions, experiments=experiments)


def _fmt(value: float) -> str:
    # repr() gives the shortest string that round-trips the float exactly
    return repr(float(value))


def write_region_csv(regions: Mapping[str, SubRegion], path: str | Path) -> None:
    """Write sub-regions to the region CSV schema (one row per id, year)."""
    path = Path(path)
    with _atomic_open(path) as fh:
        writer = csv.writer(fh)
        writer.writerow(REGION_COLUMNS)
        for rid in sorted(regions):
            region = regions[rid]
            for year in region.years():
                writer.writerow(
                    [
                        rid,
                        _fmt(region.centroid_lat),
                        _fmt(region.centroid_lon),
                        year,
                        *[_fmt(region.weather[a][year]) for a in WEATHER_ATTRIBUTES],
                        *[_fmt(region.soil[a]) for a in SOIL_ATTRIBUTES],
                    ]
                )


def write_experiments_csv(records: Iterable[ExperimentRecord], path: str | Path) -> None:
    """Write experiment records to the experiments CSV schema, in order."""
    path = Path(path)
    with _atomic_open(path) as fh:
        writer = csv.writer(fh)
        writer.writerow(EXPERIMENT_COLUMNS)
        for rec in records:
            writer.writerow(
                [
                    rec.sub_region,
                    rec.year,
                    rec.variety,
                    *[_fmt(v) for v in rec.weather],
                    *[_fmt(v) for v in rec.soil],
                    _fmt(rec.yield_value),
                ]
            )


def write_catalog(catalog: Catalog, data_dir: str | Path) -> None:
    data_dir = Path(data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    write_region_csv(catalog.sub_regions, data_dir / "region.csv")
    write_experiments_csv(catalog.experiments, data_dir / "experiments.csv")


class _atomic_open:
    """Write to a sibling temp file, then rename into place on success."""

    def __init__(self, path: Path):
        self.path = Path(path)
        self.tmp = self.path.with_name(self.path.name + ".tmp")

    def __enter__(self):
        self.fh = open(self.tmp, "w", newline="", encoding="utf-8")
        return self.fh

    def __exit__(self, exc_type, exc, tb):
        self.fh.close()
        if exc_type is None:
            os.replace(self.tmp, self.path)
        else:
            self.tmp.unlink(missing_ok=True)
        return False


def split_dataset(
    records: Sequence, ratios: tuple[float, float, float], seed: int
) -> tuple[list, list, list]:
    """Deterministically partition records into (train, valid, test).

    Sizes are floor(n * ratio) for valid and test with the remainder going
    to train, so the partition is always exhaustive and disjoint.
    """
    if len(ratios) != 3 or any(r <= 0 for r in ratios):
        raise ValueError("ratios must be three positive fractions")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1, got {sum(ratios)}")
    n = len(records)
    # tiny epsilon so e.g. 10 * 0.7 == 6.999999... still floors to the intended 7
    n_valid = int(n * ratios[1] + 1e-9)
    n_test = int(n * ratios[2] + 1e-9)
    n_train = n - n_valid - n_test
    order = np.random.default_rng(seed).permutation(n)
    train = [records[i] for i in order[:n_train]]
    valid = [records[i] for i in order[n_train : n_train + n_valid]]
    test = [records[i] for i in order[n_train + n_valid :]]
    return train, valid, test
