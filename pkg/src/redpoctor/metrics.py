"""Utility metrics: mean absolute error and mean relative error against the raw stream."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from .errors import ShapeMismatch

DEFAULT_GAMMA_FRACTION = 0.0005  # 0.05% of the day's total


def _matrix(x) -> np.ndarray:
    """Accept a (days, bins) array, a StreamPrefix, or a sequence of DayHistograms / records."""
    if isinstance(x, np.ndarray):
        if x.size == 0:
            return np.zeros((0, 0))
        return x.astype(float, copy=False).reshape(x.shape if x.ndim == 2 else (1, -1))
    rows = [getattr(getattr(item, "released", item), "bins", item) for item in x]
    if not rows:
        return np.zeros((0, 0))
    return np.array(rows, dtype=float)


def _pair(released, truth):
    r, t = _matrix(released), _matrix(truth)
    if r.shape != t.shape:
        raise ShapeMismatch(f"released {r.shape} vs truth {t.shape}")
    return r, t


def mae(released, truth) -> float:
    """Mean over all days and bins of |released - truth|. Zero days gives 0."""
    r, t = _pair(released, truth)
    if r.size == 0:
        return 0.0
    return float(np.mean(np.abs(r - t)))


def relative_errors(released, truth, gamma_fraction: float = DEFAULT_GAMMA_FRACTION) -> np.ndarray:
    """Per-bin |released - truth| / max(truth, gamma) with gamma a fraction of each day's true total."""
    if not gamma_fraction > 0:
        raise ValueError("gamma_fraction must be > 0")
    r, t = _pair(released, truth)
    gamma = gamma_fraction * t.sum(axis=1, keepdims=True)
    denom = np.maximum(t, gamma)
    denom[denom == 0] = 1.0  # all-zero day: fall back to absolute error
    return np.abs(r - t) / denom


def mre(released, truth, gamma_fraction: float = DEFAULT_GAMMA_FRACTION) -> float:
    rel = relative_errors(released, truth, gamma_fraction)
    return float(rel.mean()) if rel.size else 0.0


@dataclass
class UtilityReport:
    """Errors of one run. ``mae``/``mre`` score the published (filtered) output;
    the ``*_unfiltered`` pair scores the perturbed output before filtering."""

    mae: float = 0.0
    mre: float = 0.0
    mae_unfiltered: float = 0.0
    mre_unfiltered: float = 0.0
    per_day_errors: List[float] = field(default_factory=list)
    budget_trace: List[float] = field(default_factory=list)
    sample_days: List[int] = field(default_factory=list)

    @property
    def days(self) -> int:
        return len(self.budget_trace)

    def to_dict(self) -> dict:
        return {
            "days": self.days,
            "mae": self.mae,
            "mre": self.mre,
            "mae_unfiltered": self.mae_unfiltered,
            "mre_unfiltered": self.mre_unfiltered,
            "per_day_errors": list(self.per_day_errors),
            "budget_trace": list(self.budget_trace),
            "sample_days": list(self.sample_days),
        }


def utility_report(records: Sequence, truth, gamma_fraction: float = DEFAULT_GAMMA_FRACTION) -> UtilityReport:
    if not records:
        return UtilityReport()
    published = _matrix([r.released for r in records])
    unfiltered = _matrix([r.unfiltered for r in records])
    t = _matrix(truth)
    _pair(published, t)
    return UtilityReport(
        mae=mae(published, t),
        mre=mre(published, t, gamma_fraction),
        mae_unfiltered=mae(unfiltered, t),
        mre_unfiltered=mre(unfiltered, t, gamma_fraction),
        per_day_errors=np.mean(np.abs(published - t), axis=1).tolist(),
        budget_trace=[r.epsilon_spent for r in records],
        sample_days=[r.day for r in records if r.sampled],
    )
