"""Exception hierarchy shared across the toolkit.

Exit-code mapping for the CLI: ValidationError and its subclasses (bad
input data or bad arguments) map to exit code 1, everything else to 2.
"""

from __future__ import annotations


class CiteflowError(Exception):
    """Base class for all citeflow errors."""


class ValidationError(CiteflowError):
    """Input data violates a documented invariant."""


class ParseError(ValidationError):
    """A record file could not be parsed.

    Attributes:
        line: 1-based line number of the offending record, if known.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ArgumentError(ValidationError):
    """An operation was called with out-of-contract arguments."""


class TransportError(CiteflowError):
    """A remote fetch failed after exhausting retries."""


class UndefinedMetricError(CiteflowError):
    """A metric is mathematically undefined for the given input."""


class InsufficientDataError(CiteflowError):
    """Too few usable observations to fit a model."""


class CollinearityError(CiteflowError):
    """The model design matrix is singular.

    Attributes:
        feature: index or name of a feature whose removal restores rank.
    """

    def __init__(self, message: str, feature: str | None = None):
        super().__init__(message)
        self.feature = feature
