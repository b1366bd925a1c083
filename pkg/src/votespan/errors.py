"""Exception hierarchy for votespan.

Every error raised on a public code path derives from :class:`VotespanError`
so callers (and the CLI exit-code mapping) can distinguish our failures from
genuine bugs. Validation failures also subclass ``ValueError`` because that
is what callers idiomatically expect from bad arguments.
"""

from __future__ import annotations


class VotespanError(Exception):
    """Base class for all votespan errors."""


class ValidationError(VotespanError, ValueError):
    """An argument or input violates a documented precondition."""


class DegenerateVoteError(ValidationError):
    """A raw vote vector cannot be normalized (all entries zero)."""


class IngestionError(ValidationError):
    """A data file is malformed. Carries the offending line number."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class ResourceBudgetError(VotespanError):
    """A computation would exceed an explicit work budget."""


class RepresentationalDeficiencyError(VotespanError):
    """A vote matrix has rank below the class count, so no weight vector
    can reproduce the ideal output exactly."""


class UndefinedCorrelationError(VotespanError):
    """Pearson correlation is undefined because one series has zero
    variance."""
