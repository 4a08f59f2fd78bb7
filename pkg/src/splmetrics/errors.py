"""Exception hierarchy shared by all splmetrics modules."""


class SplMetricsError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(SplMetricsError):
    """A domain invariant was violated (duplicate ids, empty product, ...)."""


class ConfigurationError(SplMetricsError):
    """Bad knob values: weights, thresholds, schedules, worker counts."""


class UnknownComponentError(SplMetricsError):
    """A component reference does not resolve within the product set."""


class ParseError(SplMetricsError):
    """Malformed product model input. Carries source position when known."""

    def __init__(self, message: str, *, source: str | None = None,
                 line: int | None = None, column: int | None = None):
        self.source = source
        self.line = line
        self.column = column
        super().__init__(message)

    def __str__(self) -> str:
        prefix = ""
        if self.source is not None:
            prefix = f"{self.source}:"
        if self.line is not None:
            prefix += f"{self.line}:"
            if self.column is not None:
                prefix += f"{self.column}:"
        message = super().__str__()
        return f"{prefix} {message}" if prefix else message


class TokenizeError(ParseError):
    """Source text could not be tokenized (e.g. unterminated block comment)."""


class ExtractionError(SplMetricsError):
    """Source-tree extraction failed outright (unreadable root, no functions)."""
