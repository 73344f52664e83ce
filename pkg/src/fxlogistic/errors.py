"""Exception types shared across the package.

Each class carries a short ``category`` string; the CLI prints it as the
machine-readable part of its one-line error message.
"""


class FxLogisticError(Exception):
    category = "error"


class FixRangeError(FxLogisticError, ValueError):
    """A value does not fit in the Q16.16 word."""

    category = "range"


class DomainError(FxLogisticError, ValueError):
    """Map parameters outside 0 <= x <= 1, 0 < r <= 4."""

    category = "domain"


class ConfigError(FxLogisticError, ValueError):
    category = "config"


class InsufficientDataError(FxLogisticError, ValueError):
    category = "insufficient-data"


class ComparisonError(FxLogisticError, ValueError):
    category = "comparison"


class ParseError(FxLogisticError, ValueError):
    category = "parse"
