"""Laplace mechanism over bucket means, plus the seeded noise source."""

from __future__ import annotations

from typing import Optional, Sequence, Tuple

import numpy as np

from .core import DayHistogram
from .errors import NonPositiveBudget

DEFAULT_ALPHA = 150.0 / 14.0


class NoiseSource:
    """Seeded random source shared, in a fixed call order, by every noisy stage.

    Equal seeds give equal draw sequences.
    """

    def __init__(self, seed: int = 0) -> None:
        self.seed = int(seed)
        self.generator = np.random.Generator(np.random.PCG64(self.seed))

    def laplace(self, scale: float, size: Optional[int] = None):
        """Laplace(0, scale) draws (numpy's inverse-CDF sampler). ``scale`` 0 gives exact zeros."""
        if scale == 0:
            return 0.0 if size is None else np.zeros(size)
        return self.generator.laplace(0.0, scale, size)

    def normal(self, std: float, size=None):
        return self.generator.normal(0.0, std, size)

    def random(self, size=None):
        return self.generator.random(size)


def laplace_sample(scale: float, rng: NoiseSource) -> float:
    """One Laplace(0, scale) draw."""
    if not scale > 0:
        raise ValueError("scale must be > 0")
    return rng.laplace(scale)


def bucket_scales(sizes, alpha: float, eps_perturb: float, per_bucket_mean: bool = False) -> np.ndarray:
    """Laplace scale per bucket.

    By default every bucket mean gets ``alpha / eps_perturb``, the per-bin
    sensitivity. With ``per_bucket_mean`` a bucket of k bins gets
    ``alpha / (k * eps_perturb)``. A single-bin change moves only its own
    bucket's mean, and by at most alpha / k.
    """
    if not eps_perturb > 0:
        raise NonPositiveBudget(f"perturbation budget must be > 0, got {eps_perturb}")
    if not alpha > 0:
        raise ValueError("alpha must be > 0")
    sizes = np.asarray(sizes, dtype=float)
    scale = alpha / eps_perturb
    return scale / sizes if per_bucket_mean else np.full(sizes.shape, scale)


def perturb_buckets(
    means: Sequence[Tuple[object, float]],
    alpha: float,
    eps_perturb: float,
    rng: NoiseSource,
    *,
    day: int = 1,
    bin_width_minutes: int = 10,
    per_bucket_mean: bool = False,
):
    """Add one Laplace draw to each bucket mean and broadcast the noisy mean
    back over the bucket's bins.

    ``means`` is the output of :func:`redpoctor.partition.bucket_means`.
    Draws are taken in bucket order; scales come from :func:`bucket_scales`.
    """
    sizes = np.fromiter((b.size for b, _ in means), dtype=np.int64, count=len(means))
    values = np.fromiter((m for _, m in means), dtype=float, count=len(means))
    return perturb_means(
        sizes, values, alpha, eps_perturb, rng,
        day=day, bin_width_minutes=bin_width_minutes, per_bucket_mean=per_bucket_mean,
    )


def perturb_means(
    sizes: np.ndarray,
    means: np.ndarray,
    alpha: float,
    eps_perturb: float,
    rng: NoiseSource,
    *,
    day: int = 1,
    bin_width_minutes: int = 10,
    per_bucket_mean: bool = False,
):
    """Array form of :func:`perturb_buckets`: bucket sizes and means in bin order."""
    if per_bucket_mean:
        scales = bucket_scales(sizes, alpha, eps_perturb, True)
    else:
        if not eps_perturb > 0:
            raise NonPositiveBudget(f"perturbation budget must be > 0, got {eps_perturb}")
        if not alpha > 0:
            raise ValueError("alpha must be > 0")
        scales = alpha / eps_perturb
    noise = rng.laplace(1.0, len(sizes))
    noise *= scales
    noise += means
    bins = np.repeat(noise, sizes)
    bins.setflags(write=False)
    return DayHistogram._trusted(int(day), bins, int(bin_width_minutes))
