"""Simple fixed-schedule releases to compare against.

These are plain stand-ins for budget-absorption style mechanisms, not
reimplementations of them:

``uniform``
    perturb every bin of every day with budget ``epsilon / w``.
``sample_fixed``
    perturb every ``k``-th day with ``epsilon / ceil(w / k)`` and repeat the
    last release in between.

Neither partitions nor filters. Spends go through the same ledger as the main
pipeline, so they are audited the same way.
"""

from __future__ import annotations

import math
from typing import List, Tuple

from .budget import BudgetLedger, record_spend
from .core import DayHistogram, ReleaseRecord, StreamPrefix, validate_stream
from .errors import UnknownBaseline
from .metrics import UtilityReport, utility_report
from .perturbation import NoiseSource

BASELINES = ("uniform", "sample_fixed")


def _release(hist, eps: float, alpha: float, rng: NoiseSource):
    noisy = hist.bins + rng.laplace(alpha / eps, len(hist))
    return DayHistogram(hist.day, noisy, hist.bin_width_minutes)


def run_baseline(name: str, config, stream: StreamPrefix) -> Tuple[List[ReleaseRecord], UtilityReport]:
    if name not in BASELINES:
        raise UnknownBaseline(f"unknown baseline {name!r}; choose from {', '.join(BASELINES)}")
    validate_stream(stream)
    rng = NoiseSource(config.seed)
    alpha = config.sensitivity.alpha
    ledger = BudgetLedger(config.w, config.epsilon_total)
    k = 1 if name == "uniform" else config.baseline_k
    per_sample = config.epsilon_total / math.ceil(config.w / k)
    records: List[ReleaseRecord] = []
    last = None
    for hist in stream:
        if (hist.day - 1) % k == 0:
            ledger = record_spend(ledger, hist.day, per_sample)
            last = _release(hist, per_sample, alpha, rng)
            records.append(ReleaseRecord(hist.day, last, True, per_sample, k, 0.0, len(hist)))
        else:
            records.append(ReleaseRecord(hist.day, last.with_day(hist.day), False, 0.0, k, 0.0))
    return records, utility_report(records, stream, config.gamma_fraction)
