"""Exception hierarchy shared by all carekg modules.

Exit-code mapping used by the CLI: ConfigurationError and UsageError map to
exit code 2, everything else derived from CareKGError maps to exit code 1.
"""


class CareKGError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(CareKGError):
    """Invalid configuration value; message names the offending field."""


class UsageError(CareKGError):
    """An operation was called with arguments violating its contract."""


class ParseError(CareKGError):
    """Malformed N-Triples input, carrying 1-based line and column."""

    def __init__(self, message, line, column):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class GenerationError(CareKGError):
    """Cohort sampling failed (e.g. the walk-length guard tripped)."""


class RuleError(CareKGError):
    """A graph-rewriting precondition failed (e.g. cyclic temporal order)."""


class NumericError(CareKGError):
    """NaN or Inf appeared in a loss or gradient during training."""


class UndefinedMetricError(CareKGError):
    """A metric has no defined value on the given inputs."""
