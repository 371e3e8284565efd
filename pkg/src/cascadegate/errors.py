"""Exception taxonomy for the cascade engine.

Every error raised by the engine derives from :class:`CascadeGateError` so
callers (and the CLI exit-code mapping) can distinguish engine failures from
programming errors.
"""

from __future__ import annotations


class CascadeGateError(Exception):
    """Base class for all engine errors."""


class SchemaError(CascadeGateError):
    """A record is missing a required field or a field has the wrong type."""

    def __init__(self, field: str, message: str | None = None):
        self.field = field
        super().__init__(message or f"invalid or missing field: {field!r}")


class RangeError(CascadeGateError):
    """A numeric value is outside its documented bounds."""


class EmptyDistributionError(CascadeGateError):
    """A token distribution has no entries."""


class EmptyDatasetError(CascadeGateError):
    """A dataset or record stream contained no records."""


class EmptySampleError(CascadeGateError):
    """A quantile was requested from an empty sample."""


class EmptyCommitteeError(CascadeGateError):
    """Committee agreement was requested for an empty answer list."""


class OrderingAssumptionError(CascadeGateError):
    """Measured average small cost is not strictly below the large cost."""


class BudgetRangeError(CascadeGateError):
    """A target budget lies outside the feasible range for its family."""


class MissingSignalError(CascadeGateError):
    """A strategy needs a per-record signal the dataset does not carry."""

    def __init__(self, strategy: str, field: str):
        self.strategy = strategy
        self.field = field
        super().__init__(f"strategy {strategy!r} requires field {field!r}")


class InsufficientDataError(CascadeGateError):
    """The dataset is not longer than the warm-up window."""


class DatasetParseError(CascadeGateError):
    """A dataset file line could not be parsed."""

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class GridError(CascadeGateError):
    """A budget grid request was invalid."""


class CurveError(CascadeGateError):
    """A budget curve is unsorted or does not span the cost interval."""


class ParameterError(CascadeGateError):
    """Synthetic-generator parameters are out of range."""


class ConfigError(CascadeGateError):
    """A gateway or CLI configuration value is invalid."""


class UpstreamError(CascadeGateError):
    """An upstream model endpoint failed or returned an unusable response."""

    def __init__(self, message: str, status_code: int = 502):
        self.status_code = status_code
        super().__init__(message)
