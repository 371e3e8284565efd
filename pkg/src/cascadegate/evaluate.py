"""Budget sweeps, accuracy-vs-budget curves and normalized AUC.

All strategies are compared on the shared target-budget axis
[avg_small, avg_large]; the AUC is the trapezoidal integral of accuracy
over that interval divided by its width, so a constant accuracy a gives
AUC = a. Cascading never reaches escalation probability 1 inside the
shared interval; its full range up to avg_small + avg_large can be
reported separately via ``extended=True`` but is excluded from the AUC.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from cascadegate.costs import cascade_probability, routing_probability
from cascadegate.errors import CurveError, GridError
from cascadegate.policy import (
    STRATEGIES,
    PolicyConfig,
    small_call_multiplier,
    strategy_family,
)
from cascadegate.records import BudgetCurve, CostScheme, CurvePoint, ReplayRecord
from cascadegate.replay import run_replay

DEFAULT_GRID_POINTS = 21
DEFAULT_SEEDS = (0, 1, 2)

_SPAN_TOLERANCE = 1e-9


@dataclass(frozen=True, slots=True)
class SweepResult:
    strategy: str
    scheme: CostScheme
    curve: BudgetCurve
    accuracy_std: tuple[float, ...]
    extended_points: tuple[CurvePoint, ...] = ()


def budget_grid(scheme: CostScheme, n_points: int = DEFAULT_GRID_POINTS) -> list[float]:
    """Equally spaced target budgets spanning [avg_small, avg_large]."""
    if n_points < 2:
        raise GridError(f"budget grid needs at least 2 points, got {n_points!r}")
    return np.linspace(scheme.avg_small, scheme.avg_large, n_points).tolist()


def target_probability(strategy: str, budget: float, scheme: CostScheme) -> float:
    """Large-call probability for a strategy at a target budget.

    Multi-call cascades (committee) pay small_calls * avg_small before any
    escalation; on the shared grid, budgets below that floor clamp to never
    escalating (the strategy cannot spend less) and the overshoot shows up
    in the realized budget.
    """
    if strategy_family(strategy) == "routing":
        return routing_probability(budget, scheme)
    multiplier = small_call_multiplier(strategy)
    if multiplier == 1:
        return cascade_probability(budget, scheme)
    p = (budget - multiplier * scheme.avg_small) / scheme.avg_large
    return min(1.0, max(0.0, p))


def normalized_auc(
    curve: BudgetCurve | Sequence[CurvePoint], scheme: CostScheme
) -> float:
    """Trapezoidal accuracy integral over target budget, scale-normalized."""
    points = curve.points if isinstance(curve, BudgetCurve) else tuple(curve)
    if len(points) < 2:
        raise CurveError("curve needs at least 2 points")
    budgets = [p.target_budget for p in points]
    if any(b2 <= b1 for b1, b2 in zip(budgets, budgets[1:])):
        raise CurveError("curve budgets must be strictly increasing")
    span = scheme.avg_large - scheme.avg_small
    if (
        abs(budgets[0] - scheme.avg_small) > _SPAN_TOLERANCE * max(1.0, span)
        or abs(budgets[-1] - scheme.avg_large) > _SPAN_TOLERANCE * max(1.0, span)
    ):
        raise CurveError(
            f"curve spans [{budgets[0]!r}, {budgets[-1]!r}], expected "
            f"[{scheme.avg_small!r}, {scheme.avg_large!r}]"
        )
    area = 0.0
    for left, right in zip(points, points[1:]):
        area += (right.target_budget - left.target_budget) * (
            left.accuracy + right.accuracy
        ) / 2.0
    return area / span


_POOL_RECORDS: list[ReplayRecord] | None = None


def _pool_init(records: list[ReplayRecord]) -> None:
    global _POOL_RECORDS
    _POOL_RECORDS = records


def _pool_run(args: tuple[str, float, int, int]) -> tuple[float, float]:
    strategy, probability, seed, warmup_target = args
    trace = run_replay(
        _POOL_RECORDS,
        PolicyConfig(
            strategy=strategy, probability=probability, seed=seed, warmup_target=warmup_target
        ),
    )
    return trace.accuracy, trace.avg_cost


def _extended_targets(scheme: CostScheme, n_points: int) -> list[float]:
    # Continue the grid spacing past avg_large, ending exactly at the
    # cascade ceiling avg_small + avg_large.
    spacing = (scheme.avg_large - scheme.avg_small) / (n_points - 1)
    count = max(1, round(scheme.avg_small / spacing))
    step = scheme.avg_small / count
    targets = [scheme.avg_large + j * step for j in range(1, count)]
    targets.append(scheme.avg_large + scheme.avg_small)
    return targets


def sweep(
    records: Sequence[ReplayRecord],
    strategy: str,
    scheme: CostScheme,
    grid: Sequence[float] | None = None,
    seeds: Sequence[int] = DEFAULT_SEEDS,
    warmup_target: int = 10,
    n_points: int = DEFAULT_GRID_POINTS,
    jobs: int = 1,
    extended: bool = False,
) -> SweepResult:
    """Run one strategy over a budget grid, averaging accuracy across seeds."""
    targets = list(grid) if grid is not None else budget_grid(scheme, n_points)
    extended_targets: list[float] = []
    if extended and strategy_family(strategy) == "cascading":
        extended_targets = _extended_targets(scheme, len(targets))
    all_targets = targets + extended_targets

    items = [
        (strategy, target_probability(strategy, budget, scheme), seed, warmup_target)
        for budget in all_targets
        for seed in seeds
    ]
    if jobs > 1:
        with ProcessPoolExecutor(
            max_workers=jobs, initializer=_pool_init, initargs=(list(records),)
        ) as pool:
            outcomes = list(pool.map(_pool_run, items, chunksize=1))
    else:
        _pool_init(list(records))
        outcomes = [_pool_run(item) for item in items]

    n_seeds = len(seeds)
    points: list[CurvePoint] = []
    stds: list[float] = []
    for index, budget in enumerate(all_targets):
        chunk = outcomes[index * n_seeds : (index + 1) * n_seeds]
        accuracies = [accuracy for accuracy, _ in chunk]
        realized = [avg_cost for _, avg_cost in chunk]
        mean_accuracy = sum(accuracies) / n_seeds
        variance = sum((a - mean_accuracy) ** 2 for a in accuracies) / n_seeds
        points.append(
            CurvePoint(
                target_budget=budget,
                realized_budget=sum(realized) / n_seeds,
                accuracy=mean_accuracy,
            )
        )
        stds.append(math.sqrt(variance))

    main_points = tuple(points[: len(targets)])
    curve = BudgetCurve(points=main_points, normalized_auc=normalized_auc(main_points, scheme))
    return SweepResult(
        strategy=strategy,
        scheme=scheme,
        curve=curve,
        accuracy_std=tuple(stds[: len(targets)]),
        extended_points=tuple(points[len(targets):]),
    )


def available_strategies(records: Sequence[ReplayRecord]) -> list[str]:
    """Strategies whose required per-record signal every record carries."""
    names: list[str] = []
    for name, spec in STRATEGIES.items():
        if spec.required_field is None:
            names.append(name)
        elif all(getattr(r, spec.required_field) is not None for r in records):
            names.append(name)
    return names


def scheme_label(scheme: CostScheme) -> str:
    return f"cs{scheme.avg_small:g}_cl{scheme.avg_large:g}"


def format_curve_table(results: Sequence[SweepResult]) -> str:
    """Delimited curve table: ``budget,<strategy>_mean,<strategy>_std,...``."""
    if not results:
        raise CurveError("no sweep results to tabulate")
    grids = [tuple(p.target_budget for p in r.curve.points) for r in results]
    if any(g != grids[0] for g in grids[1:]):
        raise CurveError("sweep results do not share one budget grid")
    header = ["budget"]
    for result in results:
        header.append(f"{result.strategy}_mean")
        header.append(f"{result.strategy}_std")
    lines = [",".join(header)]
    for row_index, budget in enumerate(grids[0]):
        row = [f"{budget:.6f}"]
        for result in results:
            row.append(f"{result.curve.points[row_index].accuracy:.6f}")
            row.append(f"{result.accuracy_std[row_index]:.6f}")
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def format_realized_table(results: Sequence[SweepResult]) -> str:
    """Audit table of realized budgets: ``budget,<strategy>_realized,...``."""
    header = ["budget"] + [f"{r.strategy}_realized" for r in results]
    lines = [",".join(header)]
    for row_index, point in enumerate(results[0].curve.points):
        row = [f"{point.target_budget:.6f}"]
        row.extend(f"{r.curve.points[row_index].realized_budget:.6f}" for r in results)
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def format_auc_table(results: Sequence[SweepResult]) -> str:
    """AUC table: ``strategy,scheme,auc`` with six decimal places."""
    lines = ["strategy,scheme,auc"]
    for result in results:
        lines.append(
            f"{result.strategy},{scheme_label(result.scheme)},"
            f"{result.curve.normalized_auc:.6f}"
        )
    return "\n".join(lines) + "\n"


def write_text(text: str, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)
