"""Exception types raised by the estimators and the batch pipeline."""

from __future__ import annotations


class EntropyRiskError(Exception):
    """Base class for every error raised by this package."""


class FormatError(EntropyRiskError):
    """Input file does not parse under the declared CSV layout."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DataError(EntropyRiskError):
    """Parsed values violate a data invariant (e.g. non-positive price)."""


class InsufficientDataError(EntropyRiskError):
    """Too few observations for the requested estimate."""


class AlignmentError(EntropyRiskError):
    """Two series that must be paired have different lengths or dates."""


class DegenerateError(EntropyRiskError):
    """Input has zero spread where a positive one is required."""


class DomainError(EntropyRiskError, ValueError):
    """Argument outside the mathematical domain of the function."""


class ConfigError(EntropyRiskError):
    """Invalid run or generator configuration."""


class ConsistencyError(EntropyRiskError):
    """An internal identity that must hold by construction was violated."""
