"""Value types shared by every pipeline stage.

A stream is a sequence of :class:`DayHistogram` objects, one per day, each
holding a heart-rate value per fixed-width time slot (10 minutes, so 144
slots per day, unless configured otherwise).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import NegativeCount, NonConsecutiveDays, RaggedBins

BINS_PER_DAY = 144
BIN_WIDTH_MINUTES = 10


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float)  # always a copy
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DayHistogram:
    """One day's binned values.

    ``bins`` is stored as a read-only float array. Counts may be negative for
    released (noisy) histograms; :func:`validate_stream` rejects negatives in
    raw input.
    """

    day: int
    bins: np.ndarray
    bin_width_minutes: int = BIN_WIDTH_MINUTES

    def __post_init__(self) -> None:
        arr = _frozen_array(self.bins)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("bins must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"day {self.day}: bins must be finite")
        if int(self.day) < 1:
            raise ValueError(f"day index must be >= 1, got {self.day}")
        if int(self.bin_width_minutes) < 1:
            raise ValueError("bin_width_minutes must be a positive integer")
        object.__setattr__(self, "bins", arr)
        object.__setattr__(self, "day", int(self.day))
        object.__setattr__(self, "bin_width_minutes", int(self.bin_width_minutes))

    @classmethod
    def _trusted(cls, day: int, bins: np.ndarray, bin_width_minutes: int) -> "DayHistogram":
        # Skips validation; ``bins`` must already be a read-only finite float array.
        obj = object.__new__(cls)
        obj.__dict__.update(day=day, bins=bins, bin_width_minutes=bin_width_minutes)
        return obj

    def with_day(self, day: int) -> "DayHistogram":
        """Same bins relabelled to another day (bins are shared, not copied)."""
        return DayHistogram._trusted(int(day), self.bins, self.bin_width_minutes)

    def __len__(self) -> int:
        return self.bins.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, DayHistogram):
            return NotImplemented
        return (
            self.day == other.day
            and self.bin_width_minutes == other.bin_width_minutes
            and np.array_equal(self.bins, other.bins)
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True, eq=False)
class StreamPrefix:
    """Days 1..t of a stream. Use :func:`validate_stream` to check invariants."""

    histograms: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "histograms", tuple(self.histograms))

    def __len__(self) -> int:
        return len(self.histograms)

    def __iter__(self):
        return iter(self.histograms)

    def __getitem__(self, i):
        return self.histograms[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, StreamPrefix):
            return NotImplemented
        return len(self) == len(other) and all(a == b for a, b in zip(self, other))

    __hash__ = None  # type: ignore[assignment]

    @property
    def n_bins(self) -> int:
        return len(self.histograms[0]) if self.histograms else 0

    def as_array(self) -> np.ndarray:
        """(days, bins) matrix of values."""
        if not self.histograms:
            return np.zeros((0, 0))
        return np.vstack([h.bins for h in self.histograms])

    @classmethod
    def from_array(cls, values, bin_width_minutes: int = BIN_WIDTH_MINUTES) -> "StreamPrefix":
        """Build and validate a stream from a (days, bins) array."""
        values = np.asarray(values, dtype=float)
        if values.ndim != 2:
            raise ValueError("expected a (days, bins) array")
        prefix = cls(
            tuple(DayHistogram(i + 1, row, bin_width_minutes) for i, row in enumerate(values))
        )
        return validate_stream(prefix)


@dataclass(frozen=True, eq=False)
class ReleaseRecord:
    """What the pipeline publishes for one day.

    ``released`` is the published histogram (post-filter when filtering is
    on); ``unfiltered`` is the perturbed histogram before filtering, which on
    non-sampled days is the last sampled release repeated verbatim.
    """

    day: int
    released: DayHistogram
    sampled: bool
    epsilon_spent: float
    interval_next: int
    health_condition: float
    bucket_count: Optional[int] = None
    unfiltered: Optional[DayHistogram] = field(default=None)

    def __post_init__(self) -> None:
        if not self.sampled and self.epsilon_spent != 0.0:
            raise ValueError("non-sampled days must spend zero budget")
        if self.epsilon_spent < 0:
            raise ValueError("epsilon_spent must be >= 0")
        if self.interval_next < 1:
            raise ValueError("interval_next must be >= 1")
        if (self.bucket_count is not None) != self.sampled:
            raise ValueError("bucket_count is present iff the day was sampled")
        if self.unfiltered is None:
            object.__setattr__(self, "unfiltered", self.released)

    @classmethod
    def _trusted(cls, day, released, sampled, epsilon_spent, interval_next, health_condition, bucket_count, unfiltered):
        # Skips the invariant checks; used by the pipeline, which upholds them.
        obj = object.__new__(cls)
        obj.__dict__.update(
            day=day,
            released=released,
            sampled=sampled,
            epsilon_spent=epsilon_spent,
            interval_next=interval_next,
            health_condition=health_condition,
            bucket_count=bucket_count,
            unfiltered=unfiltered,
        )
        return obj

    def __eq__(self, other) -> bool:
        if not isinstance(other, ReleaseRecord):
            return NotImplemented
        return (
            self.day == other.day
            and self.released == other.released
            and self.sampled == other.sampled
            and self.epsilon_spent == other.epsilon_spent
            and self.interval_next == other.interval_next
            and self.health_condition == other.health_condition
            and self.bucket_count == other.bucket_count
            and self.unfiltered == other.unfiltered
        )

    __hash__ = None  # type: ignore[assignment]


def validate_stream(prefix: StreamPrefix, *, allow_negative: bool = False) -> StreamPrefix:
    """Check day numbering, uniform shape and non-negativity.

    Returns ``prefix`` unchanged. Raises :class:`NonConsecutiveDays`,
    :class:`RaggedBins` or :class:`NegativeCount` naming the first offending day.
    ``allow_negative`` skips the last check, for reading back noisy releases.
    """
    hs = prefix.histograms
    if not hs:
        return prefix
    n_bins, width = len(hs[0]), hs[0].bin_width_minutes
    for expected, h in enumerate(hs, start=1):
        if h.day != expected:
            raise NonConsecutiveDays(h.day)
        if len(h) != n_bins or h.bin_width_minutes != width:
            raise RaggedBins(h.day)
    if allow_negative:
        return prefix
    negative = np.flatnonzero((stack_days(hs) < 0).any(axis=1))
    if negative.size:
        raise NegativeCount(hs[negative[0]].day)
    return prefix


def stack_days(histograms: Iterable[DayHistogram]) -> np.ndarray:
    hs: Sequence[DayHistogram] = list(histograms)
    if not hs:
        return np.zeros((0, 0))
    return np.vstack([h.bins for h in hs])
