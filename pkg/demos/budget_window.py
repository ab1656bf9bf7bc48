"""Sliding-window budget: spends accumulate, then age out of the window.

A 7-day window with a total of 1.0 accepts spends until the trailing sum
would exceed the total. Once the oldest spend leaves the window its budget
is available again.
"""

from redpoctor import BudgetLedger, record_spend, remaining_budget
from redpoctor.errors import WindowBudgetExceeded

ledger = BudgetLedger(w=7, epsilon_total=1.0)
for day, eps in [(1, 0.4), (3, 0.3), (5, 0.3)]:
    ledger = record_spend(ledger, day, eps)
    print(f"day {day}: spent {eps}, remaining in window {remaining_budget(ledger, day + 1):.2f}")

try:
    record_spend(ledger, 6, 0.1)
except WindowBudgetExceeded as exc:
    print(f"day 6: refused ({exc})")

print(f"day 8: day 1 has left the window, remaining {remaining_budget(ledger, 8):.2f}")
ledger = record_spend(ledger, 8, 0.4)
print(f"day 8: spent 0.4, window sum {ledger.window_sum(2, 8):.2f}")
