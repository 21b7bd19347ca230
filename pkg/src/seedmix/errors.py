"""Exception types shared across the package."""


class SeedmixError(Exception):
    """Base class for all package-specific errors."""


class SchemaError(SeedmixError):
    """A CSV file is missing a required column."""


class CsvParseError(SeedmixError):
    """A CSV cell could not be parsed; message carries the row number."""


class ConflictError(SeedmixError):
    """Two rows claim the same (sub-region, year) slot with different data."""


class IntegrityError(SeedmixError):
    """A record references a sub-region that does not exist."""


class DataValidationError(SeedmixError):
    """A value violates a domain invariant (range, sign, ...)."""


class DataGapError(SeedmixError):
    """A sub-region is missing a year inside its required range."""


class DivergenceError(SeedmixError):
    """Training produced a non-finite loss; message carries the epoch."""


class DegenerateRangeError(SeedmixError):
    """An operation needs max > min but the values are constant."""


class UnknownCategoryError(SeedmixError):
    """A categorical value was never seen by the feature schema."""


class UndefinedScoreError(SeedmixError):
    """Spatial cohesion is undefined for an empty neighborhood."""


class NoSolutionError(SeedmixError):
    """No feasible portfolio exists at any variability threshold."""
