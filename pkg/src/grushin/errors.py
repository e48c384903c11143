"""Exception taxonomy shared by all modules.

The CLI maps these onto exit codes: config errors exit 2, data/format
errors exit 3, selftest failures exit 4.
"""


class GrushinError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(GrushinError, ValueError):
    """A mathematical precondition is violated (zero frequency, bad exponent, ...)."""


class DataError(GrushinError):
    """Payload values are unusable: non-finite samples, wrong shapes."""


class FormatError(DataError):
    """A grid file does not follow the binary format."""


class TruncationError(DataError):
    """A grid file is shorter than its header declares."""


class ConfigError(GrushinError):
    """A run configuration failed schema validation."""


class CapabilityError(GrushinError):
    """The request exceeds what the grid or truncation can represent."""


class EvaluationError(GrushinError):
    """A scalar symbol could not be evaluated where it was needed."""
