"""Exception types raised across the release pipeline."""

from __future__ import annotations


class StreamError(ValueError):
    """Base class for malformed stream input. ``day`` names the offending day."""

    def __init__(self, day: int, message: str = "") -> None:
        self.day = day
        super().__init__(message or f"{type(self).__name__}({day})")


class NonConsecutiveDays(StreamError):
    pass


class RaggedBins(StreamError):
    pass


class NegativeCount(StreamError):
    pass


class DuplicateDay(ValueError):
    def __init__(self, day: int) -> None:
        self.day = day
        super().__init__(f"spend for day {day} already recorded")


class WindowBudgetExceeded(RuntimeError):
    """A spend would push some w-day window over the total budget.

    Never expected in correct operation; the pipeline treats it as fatal.
    """

    def __init__(self, day: int, attempted_sum: float) -> None:
        self.day = day
        self.attempted_sum = attempted_sum
        super().__init__(f"window sum {attempted_sum!r} exceeds budget at day {day}")


class LengthMismatch(ValueError):
    pass


class ShapeMismatch(ValueError):
    pass


class NonPositiveBudget(ValueError):
    pass


class Uninitialized(RuntimeError):
    pass


class DegenerateWeights(UserWarning):
    """All particle likelihoods underflowed for at least one bin."""


class UnknownBaseline(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, line: int, message: str = "") -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if message else f"line {line}")


class ConfigError(ValueError):
    pass


class IoError(OSError):
    """An output file or directory could not be written."""
