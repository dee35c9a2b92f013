"""Exception hierarchy shared across the package.

Plain ``ValueError`` is used for bad call arguments (index out of range,
length mismatch, non-finite angle). The classes below cover failures that
the CLI maps to distinct exit codes: configuration (2), data (3) and
numerics (4).
"""


class QksvmError(Exception):
    """Base class for package-specific errors."""


class ConfigError(QksvmError):
    """Invalid configuration (bad qubit count, malformed config file, ...)."""


class DataError(QksvmError):
    """Problem with input data."""


class ParseError(DataError):
    """Non-numeric or non-finite cell while reading a CSV file."""


class SchemaError(DataError):
    """CSV structure does not match the expected schema."""


class DegenerateDataError(DataError):
    """Data admits no solution (single class, constant column, ...)."""


class StratificationError(DataError):
    """A cross-validation fold ended up with a single class."""


class NumericalError(QksvmError):
    """A numerical procedure failed to produce a usable result."""


class CalibrationError(NumericalError):
    """Probability calibration did not converge."""


class ConvergenceError(NumericalError):
    """Iterative solver exceeded its iteration budget."""
