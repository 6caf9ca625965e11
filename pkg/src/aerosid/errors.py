"""Exception types raised by aerosid.

The command-line layer maps these onto exit codes: data/format problems
(bad files, bad schemas, bad domains) exit 2, numeric failures (no trim,
factorization failure, kernel domain violation, divergence) exit 3.
"""


class AerosidError(Exception):
    """Base class for all package errors."""


class DataError(AerosidError):
    """Input data or configuration is malformed or out of domain."""


class SchemaError(DataError):
    """A required channel or field is missing."""


class FormatError(DataError):
    """A file is structurally invalid (non-numeric cells, bad time axis)."""


class UnitError(DataError):
    """An unknown or unsupported unit tag was declared."""


class ValidationError(DataError):
    """A structured input failed validation (duplicate/unknown fields)."""


class ConfigError(DataError):
    """A run configuration is inconsistent or incomplete."""


class InsufficientDataError(DataError):
    """Not enough samples to perform the requested operation."""


class DegenerateSampleError(DataError):
    """A sample is unusable (for instance non-positive dynamic pressure)."""


class DegenerateDesignError(DataError):
    """A regression design matrix is rank deficient."""


class LogDomainError(DataError):
    """A value that must be positive for a log transform is not."""


class HullError(DataError):
    """A query lies outside a model's validity hull."""


class ExtrapolationError(DataError):
    """A query lies too far beyond a fitted domain."""


class NumericError(AerosidError):
    """A numeric computation left its valid domain."""


class NoTrimError(NumericError):
    """The trim solver failed to converge."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


class DivergenceError(NumericError):
    """Time integration left the validity envelope."""

    def __init__(self, message: str, time_s: float = float("nan")):
        super().__init__(message)
        self.time_s = time_s


class ConditioningError(NumericError):
    """A matrix factorization failed even with maximum jitter."""
