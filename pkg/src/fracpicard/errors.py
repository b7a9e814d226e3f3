"""Exception types shared across the package.

Every error raised by this library derives from :class:`FracpicardError`,
so callers can catch one type at an API boundary.  The CLI maps each
subclass to a distinct exit code.
"""

from __future__ import annotations


class FracpicardError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(FracpicardError, ValueError):
    """An argument lies outside the documented domain of an operation."""


class SeriesConvergenceError(FracpicardError):
    """A power series failed to meet its tolerance within the term budget."""


class GridMismatchError(FracpicardError, ValueError):
    """Two grid functions that must share a grid do not."""


class ContractionError(FracpicardError):
    """The contraction precondition for an iteration does not hold."""


class IterationError(FracpicardError):
    """A fixed-point iteration exhausted its budget without converging."""


class RhsEvaluationError(FracpicardError):
    """A right-hand side returned a non-finite or mis-shaped value."""


class AnchorConditionError(FracpicardError):
    """The anchored-family precondition f(0, a, a) = a fails."""

    def __init__(self, message: str, worst_violation: float = 0.0):
        super().__init__(message)
        self.worst_violation = worst_violation


class ExpressionError(FracpicardError, ValueError):
    """Base for expression parsing and evaluation failures.

    Carries the half-open byte span ``(start, end)`` of the offending
    source fragment so callers can point at it.
    """

    def __init__(self, message: str, span: tuple[int, int]):
        super().__init__(f"{message} (at offset {span[0]})")
        self.message = message
        self.span = span


class ParseError(ExpressionError):
    """The expression source does not match the grammar."""


class EvalError(ExpressionError):
    """A parsed expression hit a numeric domain fault during evaluation."""


class ConfigError(FracpicardError, ValueError):
    """A run configuration file is malformed or fails validation."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
