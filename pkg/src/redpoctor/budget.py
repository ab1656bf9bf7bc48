"""Sliding-window budget accounting and adaptive per-sample allocation.

The ledger enforces that every ``w`` consecutive days together spend at most
``epsilon_total``. Budget that slides out of the window becomes available
again.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from .errors import DuplicateDay, WindowBudgetExceeded

WINDOW_TOLERANCE = 1e-12


@dataclass(frozen=True)
class AllocationParams:
    """Knobs for :func:`allocate_budget`.

    phi scales the interval before the log, p_max caps the portion of the
    remaining budget, epsilon_max caps the absolute spend and q is the share
    of each spend used for the partition thresholds. ``epsilon_max=None``
    means half the window budget; resolve it with :meth:`resolve`.
    """

    phi: float = 0.2
    p_max: float = 0.6
    epsilon_max: Optional[float] = None
    q: float = 0.2

    def __post_init__(self) -> None:
        if not self.phi > 0:
            raise ValueError("phi must be > 0")
        if not 0 < self.p_max <= 1:
            raise ValueError("p_max must lie in (0, 1]")
        if self.epsilon_max is not None and not self.epsilon_max > 0:
            raise ValueError("epsilon_max must be > 0")
        if not 0 < self.q < 1:
            raise ValueError("q must lie strictly between 0 and 1")

    def resolve(self, epsilon_total: float) -> "AllocationParams":
        if self.epsilon_max is not None:
            return self
        return AllocationParams(self.phi, self.p_max, epsilon_total / 2.0, self.q)


class BudgetLedger:
    """Immutable record of per-day spends.

    ``days`` (strictly increasing) and ``amounts`` are parallel sequences;
    days without an entry spent nothing. All mutators return a new ledger.

    Appending a later day shares storage with the parent ledger (each ledger
    only sees the first ``len(self)`` entries), so a run of appends costs
    O(1) each rather than copying the whole history.
    """

    __slots__ = ("w", "epsilon_total", "_days", "_amounts", "_n")

    def __init__(self, w: int, epsilon_total: float, days=(), amounts=()) -> None:
        if int(w) < 1:
            raise ValueError("window length w must be >= 1")
        if not epsilon_total > 0:
            raise ValueError("epsilon_total must be > 0")
        days, amounts = [int(d) for d in days], [float(a) for a in amounts]
        if len(days) != len(amounts):
            raise ValueError("days and amounts must have equal length")
        if any(b <= a for a, b in zip(days, days[1:])):
            raise ValueError("days must be strictly increasing")
        self._init(int(w), float(epsilon_total), days, amounts, len(days))

    def _init(self, w, epsilon_total, days, amounts, n) -> None:
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "epsilon_total", epsilon_total)
        object.__setattr__(self, "_days", days)
        object.__setattr__(self, "_amounts", amounts)
        object.__setattr__(self, "_n", n)

    @classmethod
    def _view(cls, w, epsilon_total, days, amounts, n) -> "BudgetLedger":
        obj = object.__new__(cls)
        obj._init(w, epsilon_total, days, amounts, n)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("BudgetLedger is immutable")

    def __len__(self) -> int:
        return self._n

    def __eq__(self, other) -> bool:
        if not isinstance(other, BudgetLedger):
            return NotImplemented
        return (self.w, self.epsilon_total, self.days, self.amounts) == (
            other.w,
            other.epsilon_total,
            other.days,
            other.amounts,
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"BudgetLedger(w={self.w}, epsilon_total={self.epsilon_total}, entries={self._n})"

    @property
    def days(self) -> Tuple[int, ...]:
        return tuple(self._days[: self._n])

    @property
    def amounts(self) -> Tuple[float, ...]:
        return tuple(self._amounts[: self._n])

    @property
    def spends(self) -> Dict[int, float]:
        return dict(zip(self.days, self.amounts))

    def window_sum(self, first: int, last: int) -> float:
        """Total spend over days ``first..last`` inclusive."""
        if last < first or not self._n:
            return 0.0
        lo = bisect.bisect_left(self._days, first, 0, self._n)
        hi = bisect.bisect_right(self._days, last, lo, self._n)
        return math.fsum(self._amounts[lo:hi])

    @property
    def last_day(self) -> int:
        return self._days[self._n - 1] if self._n else 0

    def _appended(self, day: int, eps: float) -> "BudgetLedger":
        days, amounts, n = self._days, self._amounts, self._n
        if len(days) != n:
            # Another ledger already extended the shared storage: branch off.
            days, amounts = days[:n], amounts[:n]
        days.append(day)
        amounts.append(eps)
        return BudgetLedger._view(self.w, self.epsilon_total, days, amounts, n + 1)


def remaining_budget(ledger: BudgetLedger, day: int) -> float:
    """Budget left for ``day``: the total minus spends over the previous w-1 days."""
    if day < 1:
        raise ValueError("day must be >= 1")
    spent = ledger.window_sum(max(1, day - ledger.w + 1), day - 1)
    return max(0.0, ledger.epsilon_total - spent)


def allocation_portion(interval: int, params: AllocationParams) -> float:
    """Share of the remaining budget handed to a sample: min(ln(phi*I + 1), p_max)."""
    return min(math.log1p(params.phi * interval), params.p_max)


def allocate_budget(eps_r: float, interval: int, params: AllocationParams) -> float:
    """Budget for the coming sample given remaining budget and sampling interval.

    Longer intervals get a larger share, up to ``p_max`` of ``eps_r`` and never
    more than ``epsilon_max``.
    """
    if eps_r < 0:
        raise ValueError("eps_r must be >= 0")
    if interval < 1:
        raise ValueError("interval must be >= 1")
    if params.epsilon_max is None:
        raise ValueError("epsilon_max is unresolved; call AllocationParams.resolve first")
    return min(allocation_portion(interval, params) * eps_r, params.epsilon_max)


def record_spend(ledger: BudgetLedger, day: int, eps: float) -> BudgetLedger:
    """Return a ledger with ``eps`` spent on ``day``.

    Raises :class:`WindowBudgetExceeded` if any w-window containing ``day``
    would exceed the total, :class:`DuplicateDay` if the day already has an entry.
    """
    if eps < 0 or not math.isfinite(eps):
        raise ValueError("eps must be finite and >= 0")
    day = int(day)
    if day < 1:
        raise ValueError("day must be >= 1")
    if ledger._n and day <= ledger.last_day:
        days, amounts = ledger.days, ledger.amounts
        pos = bisect.bisect_left(days, day)
        if days[pos] == day:
            raise DuplicateDay(day)
        candidate = BudgetLedger._view(
            ledger.w,
            ledger.epsilon_total,
            list(days[:pos] + (day,) + days[pos:]),
            list(amounts[:pos] + (float(eps),) + amounts[pos:]),
            len(days) + 1,
        )
        # A back-filled day sits inside windows ending at day..day+w-1.
        for end in range(day, day + ledger.w):
            total = candidate.window_sum(end - ledger.w + 1, end)
            if total > ledger.epsilon_total + WINDOW_TOLERANCE:
                raise WindowBudgetExceeded(day, total)
        return candidate

    # Appending: every later window is a subset of the one ending at ``day``.
    total = math.fsum((ledger.window_sum(day - ledger.w + 1, day - 1), eps))
    if total > ledger.epsilon_total + WINDOW_TOLERANCE:
        raise WindowBudgetExceeded(day, total)
    return ledger._appended(day, float(eps))
