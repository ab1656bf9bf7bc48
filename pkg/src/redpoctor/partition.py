"""Private partitioning of a day histogram into contiguous buckets.

Buckets are later averaged and noised as a unit, so the partition decides
which bins share a value. Two patterns are kept out of the averaging:

* a rapid change between adjacent bins (jump above the rate threshold) puts
  both endpoints of the jump into singleton buckets;
* a slow drift ends the current bucket once its spread exceeds the drift
  threshold, and buckets are capped at ``t_s`` bins.

The drift and rate thresholds are noised with Laplace draws before use, which
is what makes the bucket structure itself private.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .errors import NonPositiveBudget
from .perturbation import NoiseSource

THRESHOLD_FLOOR = 0.1


@dataclass(frozen=True)
class PartitionThresholds:
    t_d: float = 30.0
    t_r: float = 15.0
    t_s: int = 4

    def __post_init__(self) -> None:
        if not (self.t_d > 0 and self.t_r > 0):
            raise ValueError("t_d and t_r must be > 0")
        if self.t_r > self.t_d:
            raise ValueError("t_r must not exceed t_d")
        if int(self.t_s) != self.t_s or self.t_s < 1:
            raise ValueError("t_s must be an integer >= 1")


@dataclass(frozen=True, eq=False)
class Bucket:
    """Bins ``start..end`` (inclusive) and their values."""

    start: int
    end: int
    values: Tuple[float, ...]

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ValueError("bucket start must not exceed end")
        if len(self.values) != self.end - self.start + 1:
            raise ValueError("values length must equal end - start + 1")

    @property
    def size(self) -> int:
        return self.end - self.start + 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, Bucket):
            return NotImplemented
        return (self.start, self.end, tuple(self.values)) == (other.start, other.end, tuple(other.values))

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class BucketSet:
    """Ordered buckets that cover bins ``0..n-1`` exactly once."""

    buckets: Tuple[Bucket, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "buckets", tuple(self.buckets))
        expected = 0
        for b in self.buckets:
            if b.start != expected:
                raise ValueError(f"bucket starting at {b.start} breaks contiguity (expected {expected})")
            expected = b.end + 1

    def __len__(self) -> int:
        return len(self.buckets)

    def __iter__(self):
        return iter(self.buckets)

    @property
    def n_bins(self) -> int:
        return self.buckets[-1].end + 1 if self.buckets else 0

    def bounds(self) -> List[Tuple[int, int]]:
        return [(b.start, b.end) for b in self.buckets]


def noisy_thresholds(
    thresholds: PartitionThresholds,
    eps_partition: float,
    alpha: float,
    rng: NoiseSource,
    floor: float = THRESHOLD_FLOOR,
) -> Tuple[float, float]:
    """Laplace-noised (drift, rate) thresholds.

    The partition budget is split evenly; each threshold gets noise of scale
    ``alpha / (eps_partition / 2)``. The drift noise is drawn first. Results
    are clamped below at ``floor``.
    """
    if not eps_partition > 0:
        raise NonPositiveBudget(f"partition budget must be > 0, got {eps_partition}")
    if not alpha > 0:
        raise ValueError("alpha must be > 0")
    scale = alpha / (eps_partition / 2.0)
    noise_d, noise_r = rng.laplace(scale, 2).tolist()
    return max(floor, thresholds.t_d + noise_d), max(floor, thresholds.t_r + noise_r)


def partition_bounds(values: Sequence[float], t_hat_d: float, t_hat_r: float, t_s: int) -> List[Tuple[int, int]]:
    """Single left-to-right pass returning inclusive ``(start, end)`` pairs."""
    x = list(values)
    n = len(x)
    if n == 0:
        raise ValueError("cannot partition an empty histogram")
    bounds: List[Tuple[int, int]] = []
    start = 0  # None while no bucket is open (right after a jump)
    lo = hi = x[0]
    for i in range(1, n):
        d = x[i]
        if abs(x[i - 1] - d) > t_hat_r:
            if start is not None:
                if i - 1 > start:
                    bounds.append((start, i - 2))
                bounds.append((i - 1, i - 1))
            bounds.append((i, i))
            start = None
            continue
        if start is None:
            start, lo, hi = i, d, d
            continue
        new_lo = lo if lo < d else d
        new_hi = hi if hi > d else d
        if new_hi - new_lo <= t_hat_d and i - start + 1 <= t_s:
            lo, hi = new_lo, new_hi
        else:
            bounds.append((start, i - 1))
            start, lo, hi = i, d, d
    if start is not None:
        bounds.append((start, n - 1))
    return bounds


def dp_partition(hist, t_hat_d: float, t_hat_r: float, t_s: int) -> BucketSet:
    """Partition a histogram with already-noised thresholds.

    ``hist`` is a :class:`~redpoctor.core.DayHistogram` or a 1-D sequence.
    """
    values = np.asarray(getattr(hist, "bins", hist), dtype=float)
    bounds = partition_bounds(values.tolist(), t_hat_d, t_hat_r, t_s)
    return BucketSet(tuple(Bucket(s, e, tuple(values[s : e + 1].tolist())) for s, e in bounds))


def bucket_means(bset: BucketSet) -> List[Tuple[Bucket, float]]:
    return [(b, math.fsum(b.values) / b.size) for b in bset]


def bucket_layout(values, bounds: Sequence[Tuple[int, int]]) -> Tuple[np.ndarray, np.ndarray]:
    """Sizes and means of the buckets given by ``bounds`` (as from :func:`partition_bounds`)."""
    x = np.asarray(values, dtype=float)
    edges = np.array([s for s, _ in bounds] + [bounds[-1][1] + 1], dtype=np.intp)
    sizes = edges[1:] - edges[:-1]
    return sizes, np.add.reduceat(x, edges[:-1]) / sizes
