"""Cost accounting: budget <-> call-probability conversions and averages.

Routing spends on exactly one model per query, so a target average cost c
maps to the large-call probability via

    c = (1 - p_r) * avg_small + p_r * avg_large.

Cascading always pays the small model and sometimes adds the large one:

    c = avg_small + p_c * avg_large.

Both conversions below are the exact inversions of those identities.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

from cascadegate.errors import BudgetRangeError, EmptyDatasetError
from cascadegate.records import CostScheme, ReplayRecord

ROUTING = "routing"
CASCADING = "cascading"

FAMILIES = frozenset({ROUTING, CASCADING})


@dataclass(frozen=True, slots=True)
class BudgetTarget:
    """A target average cost per query, tagged with the strategy family."""

    target_avg_cost: float
    family: str

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise BudgetRangeError(f"unknown family {self.family!r}")


def routing_probability(c: float, scheme: CostScheme) -> float:
    """Large-call probability hitting average cost ``c`` under routing."""
    if not scheme.avg_small <= c <= scheme.avg_large:
        raise BudgetRangeError(
            f"routing budget {c!r} outside [{scheme.avg_small!r}, {scheme.avg_large!r}]"
        )
    return (c - scheme.avg_small) / (scheme.avg_large - scheme.avg_small)


def cascade_probability(c: float, scheme: CostScheme) -> float:
    """Escalation probability hitting average cost ``c`` under cascading.

    Feasible budgets run from avg_small (never escalate) to
    avg_small + avg_large (always escalate).
    """
    ceiling = scheme.avg_small + scheme.avg_large
    if c < scheme.avg_small or c > ceiling:
        raise BudgetRangeError(
            f"cascade budget {c!r} outside [{scheme.avg_small!r}, {ceiling!r}]"
        )
    return (c - scheme.avg_small) / scheme.avg_large


def call_probability(target: BudgetTarget, scheme: CostScheme) -> float:
    if target.family == ROUTING:
        return routing_probability(target.target_avg_cost, scheme)
    return cascade_probability(target.target_avg_cost, scheme)


def measure_averages(records: Iterable[ReplayRecord]) -> CostScheme:
    """Arithmetic-mean cost scheme measured from a record stream."""
    total_small = 0.0
    total_large = 0.0
    count = 0
    for record in records:
        total_small += record.small_cost
        total_large += record.large_cost
        count += 1
    if count == 0:
        raise EmptyDatasetError("cannot measure costs from an empty stream")
    # CostScheme enforces avg_small < avg_large and raises otherwise.
    return CostScheme(
        avg_small=total_small / count,
        avg_large=total_large / count,
        source="measured",
    )
