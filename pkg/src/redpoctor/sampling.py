"""Adaptive sampling: decide which days are perturbed and which repeat the last release.

A PID controller turns the dissimilarity between consecutive released
histograms into an error signal. That signal, the health score and the
remaining budget set the next sampling interval.

Only released histograms flow into this module.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, Optional, Tuple

import numpy as np

from .errors import LengthMismatch

COMPOSITIONS = ("max", "min")


@dataclass
class SamplerState:
    """Mutable controller state owned by one pipeline.

    ``error_history`` keeps the errors of the last ``m`` sampling days as
    ``(day, e)`` pairs. ``max_interval=None`` leaves intervals uncapped.
    """

    theta_p: float = 0.8
    theta_i: float = 0.2
    theta_d: float = 0.0
    delta: float = 0.05
    eta: float = 2.0
    m: int = 3
    max_interval: Optional[int] = None
    health_term_composition: str = "max"
    error_history: Deque[Tuple[int, float]] = field(default_factory=deque)
    last_sample_day: int = 0
    last_interval: int = 1
    next_sample_day: int = 1

    def __post_init__(self) -> None:
        if not self.delta > 0:
            raise ValueError("delta must be > 0")
        if not self.eta > 0:
            raise ValueError("eta must be > 0")
        if int(self.m) < 1:
            raise ValueError("m must be >= 1")
        if self.max_interval is not None and self.max_interval < 1:
            raise ValueError("max_interval must be >= 1")
        if self.health_term_composition not in COMPOSITIONS:
            raise ValueError(f"health_term_composition must be one of {COMPOSITIONS}")
        self.error_history = deque(self.error_history, maxlen=int(self.m))


def pearson_feedback(prev_released, curr_released) -> float:
    """Correlation between two released histograms.

    Both constant gives 1.0 (nothing changed); exactly one constant gives 0.0.
    """
    a = np.asarray(getattr(prev_released, "bins", prev_released), dtype=float)
    b = np.asarray(getattr(curr_released, "bins", curr_released), dtype=float)
    if a.shape != b.shape:
        raise LengthMismatch(f"{a.size} bins vs {b.size} bins")
    da = a - a.sum() / a.size
    db = b - b.sum() / b.size
    va = float(da @ da)
    vb = float(db @ db)
    if va == 0.0 or vb == 0.0:
        a_const = not da.any()
        b_const = not db.any()
        if a_const and b_const:
            return 1.0
        if a_const or b_const:
            return 0.0
        # Neither is constant but the squares underflowed: rescale first.
        da = da / np.abs(da).max()
        db = db / np.abs(db).max()
        va, vb = float(da @ da), float(db @ db)
    rho = float(da @ db) / (math.sqrt(va) * math.sqrt(vb))
    return min(1.0, max(-1.0, rho))


def pid_error(state: SamplerState, E: float, day: int) -> float:
    """Controller output for a sampling day; records the day's error in ``state``.

    The proportional term uses e = |E - delta| / delta. The integral term
    averages e together with the up-to-m stored errors from earlier
    sampling days. The derivative term divides e by the days since the last
    sample.
    """
    if day <= state.last_sample_day:
        raise ValueError("day must come after the last sampling day")
    e = abs(E - state.delta) / state.delta
    past = [err for _, err in state.error_history]
    integral = (math.fsum(past) + e) / (len(past) + 1)
    derivative = e / (day - state.last_sample_day)
    state.error_history.append((day, e))
    return state.theta_p * e + state.theta_i * integral + state.theta_d * derivative


def interval_terms(last_interval: float, eta: float, u: float, c: float, eps_r: float):
    """The two candidate intervals before composition and rounding."""
    if eps_r > 0:
        lam = 1.0 / eps_r
        error_term = last_interval + eta * (1.0 - (u / lam) ** 2)
        health_term = last_interval + eta * (1.0 - (c / lam) ** 2)
    else:
        # lambda = inf: both ratios vanish
        error_term = health_term = last_interval + eta
    return error_term, health_term


def next_interval(state: SamplerState, u: float, c: float, eps_r: float) -> int:
    """Next sampling interval in days (>= 1).

    Each candidate is the last interval nudged by ``eta * (1 - (x / lambda)^2)``
    with lambda = 1 / eps_r. The candidates are combined per
    ``state.health_term_composition``, then rounded half up.
    """
    if not 0.0 <= c <= 1.0:
        raise ValueError("health condition must lie in [0, 1]")
    if eps_r < 0:
        raise ValueError("eps_r must be >= 0")
    error_term, health_term = interval_terms(state.last_interval, state.eta, u, c, eps_r)
    if state.health_term_composition == "max":
        raw = max(1.0, error_term, health_term)
    else:
        raw = max(1.0, min(error_term, health_term))
    return max(1, int(math.floor(raw + 0.5)))


def should_sample(state: SamplerState, day: int) -> bool:
    return day == 1 or day >= state.next_sample_day


def schedule(state: SamplerState, day: int, interval: int) -> int:
    """Commit a sampling decision made on ``day``; returns the (capped) interval."""
    if state.max_interval is not None:
        interval = min(interval, state.max_interval)
    state.last_sample_day = day
    state.last_interval = interval
    state.next_sample_day = day + interval
    return interval
