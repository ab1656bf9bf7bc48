"""Heart-rhythm features of a released histogram and the health score built on them.

The defaults are illustrative, not clinical. Everything here reads released
histograms only, so it costs no privacy budget.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np


@dataclass(frozen=True)
class FeatureThresholds:
    """Event thresholds and the tolerance each feature count is divided by.

    rapid_jump: adjacent-bin change (bpm) counted as a rapid change.
    large_drift: spread (bpm) within one ``drift_window_bins`` window counted as a drift.
    hr_max / hr_min: bins above / below these count as high / low.
    """

    rapid_jump: float = 30.0
    large_drift: float = 50.0
    drift_window_bins: int = 12
    hr_max: float = 100.0
    hr_min: float = 50.0
    n_r: float = 3.0
    n_g: float = 2.0
    n_h: float = 12.0
    n_l: float = 12.0

    def __post_init__(self) -> None:
        if not self.hr_min < self.hr_max:
            raise ValueError("hr_min must be below hr_max")
        if min(self.n_r, self.n_g, self.n_h, self.n_l) <= 0:
            raise ValueError("feature tolerances must be > 0")
        if self.drift_window_bins < 1:
            raise ValueError("drift_window_bins must be >= 1")


class HealthFeatures(NamedTuple):
    h_r: int  # rapid changes between adjacent bins
    h_g: int  # windows with a large drift
    h_h: int  # bins above hr_max
    h_l: int  # bins below hr_min
    c: float = 0.0


def extract_features(released, th: FeatureThresholds, *, literal_max: bool = False) -> HealthFeatures:
    """Count the four rhythm events in ``released`` and attach its health score.

    Drift windows do not overlap; a trailing partial window is still checked.
    """
    x = np.asarray(getattr(released, "bins", released), dtype=float)
    h_r = int(np.count_nonzero(np.abs(x[1:] - x[:-1]) > th.rapid_jump))
    if x.size <= th.drift_window_bins:
        h_g = int(x.max() - x.min() > th.large_drift)  # a single window
    else:
        starts = _window_starts(x.size, th.drift_window_bins)
        spread = np.maximum.reduceat(x, starts) - np.minimum.reduceat(x, starts)
        h_g = int(np.count_nonzero(spread > th.large_drift))
    h_h = int(np.count_nonzero(x > th.hr_max))
    h_l = int(np.count_nonzero(x < th.hr_min))
    load = 0.25 * (h_r / th.n_r + h_g / th.n_g + h_h / th.n_h + h_l / th.n_l)
    return HealthFeatures(h_r, h_g, h_h, h_l, _cap(load, literal_max))


@lru_cache(maxsize=64)
def _window_starts(n: int, k: int) -> np.ndarray:
    starts = np.arange(0, n, k)
    starts.setflags(write=False)
    return starts


def _cap(load: float, literal_max: bool) -> float:
    return max(load, 1.0) if literal_max else min(load, 1.0)


def health_condition(f: HealthFeatures, th: FeatureThresholds, *, literal_max: bool = False) -> float:
    """Mean tolerance-normalised feature load, capped at 1.

    ``literal_max=True`` takes max(load, 1) instead, which is always >= 1 and
    only exists for fidelity experiments.
    """
    load = 0.25 * (f.h_r / th.n_r + f.h_g / th.n_g + f.h_h / th.n_h + f.h_l / th.n_l)
    return _cap(load, literal_max)
