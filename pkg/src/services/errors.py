"""Domain errors: the single hierarchy every module raises from.

All of them are ``ValueError`` subclasses so callers that only care about
"bad input" can catch one thing; the CLI maps the whole family to exit code 1
and the API to HTTP 422.
"""


class FourierVolError(ValueError):
    """Base class for every validation or data-condition error."""


class EmptySeries(FourierVolError):
    """Fewer observations than an operation needs (or an empty file)."""


class UnorderedInput(FourierVolError):
    """Observation times are not monotone."""


class OutOfWindow(FourierVolError):
    """Times or grid points fall outside the estimation window."""


class WindowMismatch(FourierVolError):
    """Two series were rescaled from different raw-clock windows."""


class CoeffRangeError(FourierVolError):
    """A coefficient table does not reach the frequency an operation needs."""

    def __init__(self, message: str, required: int | None = None):
        super().__init__(message)
        self.required = required


class InvalidCutoff(FourierVolError):
    """Cutoff frequency N outside the range an estimator accepts."""


class InvalidMesh(FourierVolError):
    """Non-positive or non-finite mesh passed to a cutoff rule."""


class NumericalInconsistency(FourierVolError, ArithmeticError):
    """An algebraic guarantee failed beyond tolerance; this is a bug, not data."""


class DegenerateGrid(FourierVolError):
    """A synchronization grid has no intervals."""


class ModelError(FourierVolError):
    """Invalid simulation model parameters."""


class ResampleError(FourierVolError):
    """A sampling scheme produced too few observations."""


class ConfigError(FourierVolError):
    """Invalid run or study configuration."""


class SchemaError(FourierVolError):
    """CSV header or row shape does not match ``asset_id,timestamp,log_price``."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line


class ParseError(FourierVolError):
    """A CSV field could not be parsed as a number."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line


class ReportMismatch(FourierVolError):
    """A loaded report's summary differs from its records."""
