"""Synthetic heart-rate streams.

A healthy day is a circadian sinusoid between 55 and 90 bpm, plus a small
per-day offset and bounded autoregressive jitter. It stays inside
[50.5, 94.5] bpm, so with the default feature thresholds it triggers no
events. A sick day adds spikes (adjacent jumps above 30 bpm), ramped drifts
of 60-80 bpm, plateaus above 100 bpm and bradycardic stretches below 50 bpm.
"""

from __future__ import annotations

import numpy as np
from scipy.signal import lfilter

from .core import BINS_PER_DAY, BIN_WIDTH_MINUTES, StreamPrefix

PROFILES = ("healthy", "sick", "mixed", "constant")
MIXED_BLOCK_DAYS = 7


def circadian_day(rng: np.random.Generator, n_bins: int) -> np.ndarray:
    t = np.arange(n_bins) / n_bins
    base = 72.5 - 17.5 * np.cos(2.0 * np.pi * (t - 0.15))
    offset = rng.uniform(-1.5, 1.5)
    jitter = lfilter([1.0], [1.0, -0.7], rng.normal(0.0, 1.2, n_bins))
    return base + offset + np.clip(jitter, -3.0, 3.0)


def _inject_sick(rng: np.random.Generator, x: np.ndarray) -> np.ndarray:
    n = x.size
    x = x.copy()
    for _ in range(1 + rng.poisson(2.0)):
        length = int(rng.integers(1, 4))
        p = int(rng.integers(0, max(1, n - length)))
        x[p : p + length] += rng.uniform(38.0, 55.0)
    if rng.random() < 0.8 and n >= 40:
        rise = rng.uniform(60.0, 80.0)
        ramp = int(rng.integers(6, 10))
        hold = int(rng.integers(6, 18))
        p = int(rng.integers(0, n - 2 * ramp - hold))
        up = np.linspace(0.0, rise, ramp + 1)[1:]
        x[p : p + ramp] += up
        x[p + ramp : p + ramp + hold] += rise
        x[p + ramp + hold : p + 2 * ramp + hold] += up[::-1]
    if rng.random() < 0.7 and n >= 30:
        length = int(rng.integers(12, 25))
        p = int(rng.integers(0, n - length))
        x[p : p + length] = rng.uniform(105.0, 125.0) + rng.normal(0.0, 2.0, length)
    if rng.random() < 0.4 and n >= 30:
        length = int(rng.integers(12, 25))
        p = int(rng.integers(0, n // 3))
        x[p : p + length] = rng.uniform(40.0, 46.0) + rng.normal(0.0, 1.0, length)
    return np.maximum(x, 30.0)


def generate_synthetic(
    seed: int,
    days: int,
    profile: str = "mixed",
    bins_per_day: int = BINS_PER_DAY,
    bin_width_minutes: int = BIN_WIDTH_MINUTES,
) -> StreamPrefix:
    """Deterministic synthetic stream.

    ``mixed`` alternates 7-day healthy and sick blocks, starting healthy.
    ``constant`` is a flat 70 bpm every bin of every day.
    """
    if days < 1:
        raise ValueError("days must be >= 1")
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}; choose from {', '.join(PROFILES)}")
    rng = np.random.Generator(np.random.PCG64(seed))
    rows = []
    for d in range(days):
        if profile == "constant":
            rows.append(np.full(bins_per_day, 70.0))
            continue
        x = circadian_day(rng, bins_per_day)
        sick = profile == "sick" or (profile == "mixed" and (d // MIXED_BLOCK_DAYS) % 2 == 1)
        rows.append(_inject_sick(rng, x) if sick else x)
    return StreamPrefix.from_array(np.vstack(rows), bin_width_minutes)
