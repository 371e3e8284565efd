"""Core domain types shared by every module.

All types here are immutable after validation and safe to share across
threads. Validation lives in :func:`validate_record`; the dataclasses
themselves carry no behaviour.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, fields

from cascadegate.errors import (
    EmptyDistributionError,
    OrderingAssumptionError,
    RangeError,
    SchemaError,
)

# Listed probabilities may sum slightly above 1 because upstream APIs return
# truncated top-k lists with independently rounded values.
PROB_SUM_SLACK = 1e-6


@dataclass(frozen=True, slots=True)
class TokenDistribution:
    """Top-k probabilities for one generated token position.

    ``entries`` is sorted by probability, non-increasing. The list may be a
    truncated top-k of the full distribution, so entries can sum to less
    than 1. ``position`` is the 1-based token index (always 1 here: the
    decision signal is the first generated token).
    """

    entries: tuple[tuple[str, float], ...]
    position: int = 1

    @classmethod
    def from_pairs(cls, pairs: Sequence[Sequence[object]], position: int = 1) -> TokenDistribution:
        """Validate and sort raw (token, probability) pairs."""
        items: list[tuple[str, float]] = []
        for pair in pairs:
            if len(pair) != 2:
                raise SchemaError("small_first_token", "each entry must be a [token, prob] pair")
            token, prob = pair
            if not isinstance(token, str):
                raise SchemaError("small_first_token", "token must be text")
            if isinstance(prob, bool) or not isinstance(prob, (int, float)):
                raise SchemaError("small_first_token", "probability must be a number")
            prob = float(prob)
            if not 0.0 <= prob <= 1.0:
                raise RangeError(f"token probability {prob!r} outside [0, 1]")
            items.append((token, prob))
        if not items:
            raise EmptyDistributionError("token distribution has no entries")
        total = sum(prob for _, prob in items)
        if total > 1.0 + PROB_SUM_SLACK:
            raise RangeError(f"token probabilities sum to {total!r} > 1")
        items.sort(key=lambda item: item[1], reverse=True)
        return cls(entries=tuple(items), position=position)


@dataclass(frozen=True, slots=True)
class ReplayRecord:
    """One query's full offline trace.

    Correctness booleans are precomputed by the dataset producer; the engine
    never matches answer strings. Optional score fields are only required by
    the strategies that consume them.
    """

    id: str
    task: str
    small_first_token: TokenDistribution
    small_answer: str
    small_correct: bool
    large_answer: str
    large_correct: bool
    small_cost: float
    large_cost: float
    router_score: float | None = None
    hybrid_score: float | None = None
    frugal_score: float | None = None
    committee_answers: tuple[str, ...] | None = None


@dataclass(frozen=True, slots=True)
class CostScheme:
    """Average per-query costs of the two models, with strict ordering."""

    avg_small: float
    avg_large: float
    source: str = "fixed"

    def __post_init__(self) -> None:
        if self.avg_small <= 0.0:
            raise RangeError(f"avg_small must be > 0, got {self.avg_small!r}")
        if not self.avg_small < self.avg_large:
            raise OrderingAssumptionError(
                f"avg_small ({self.avg_small!r}) must be strictly below "
                f"avg_large ({self.avg_large!r})"
            )

    @classmethod
    def fixed(cls, cost_small: float, cost_large: float) -> CostScheme:
        return cls(avg_small=float(cost_small), avg_large=float(cost_large), source="fixed")


@dataclass(frozen=True, slots=True)
class DecisionRow:
    """One realized decision inside a replay trace."""

    record_id: str
    called_large: bool
    answered_correctly: bool
    incurred_cost: float
    was_warmup: bool


@dataclass(frozen=True, slots=True)
class RunTrace:
    """Realized decision sequence for one (policy, budget, seed) run.

    Accuracy and total cost cover evaluated (post-warm-up) rows only; the
    first ``warmup_count`` rows of ``decisions`` are the calibration prefix.
    """

    decisions: tuple[DecisionRow, ...]
    warmup_count: int
    total_cost: float
    evaluated_queries: int
    accuracy: float

    @property
    def avg_cost(self) -> float:
        return self.total_cost / self.evaluated_queries

    @property
    def escalation_rate(self) -> float:
        escalated = sum(1 for row in self.decisions if not row.was_warmup and row.called_large)
        return escalated / self.evaluated_queries


@dataclass(frozen=True, slots=True)
class CurvePoint:
    target_budget: float
    realized_budget: float
    accuracy: float


@dataclass(frozen=True, slots=True)
class BudgetCurve:
    """Accuracy-vs-budget points over [avg_small, avg_large], plus their AUC."""

    points: tuple[CurvePoint, ...]
    normalized_auc: float


_REQUIRED_FIELDS = (
    "id",
    "task",
    "small_first_token",
    "small_answer",
    "small_correct",
    "large_answer",
    "large_correct",
    "small_cost",
    "large_cost",
)
_OPTIONAL_SCORE_FIELDS = ("router_score", "hybrid_score", "frugal_score")


def _require_text(raw: Mapping[str, object], name: str) -> str:
    value = raw[name]
    if not isinstance(value, str):
        raise SchemaError(name, f"field {name!r} must be text")
    return value


def _require_bool(raw: Mapping[str, object], name: str) -> bool:
    value = raw[name]
    if not isinstance(value, bool):
        raise SchemaError(name, f"field {name!r} must be a boolean")
    return value


def _require_positive(raw: Mapping[str, object], name: str) -> float:
    value = raw[name]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(name, f"field {name!r} must be a number")
    value = float(value)
    if not value > 0.0:
        raise RangeError(f"field {name!r} must be > 0, got {value!r}")
    return value


def _optional_unit_interval(raw: Mapping[str, object], name: str) -> float | None:
    value = raw.get(name)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(name, f"field {name!r} must be a number")
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise RangeError(f"field {name!r} outside [0, 1]: {value!r}")
    return value


def record_to_raw(record: ReplayRecord) -> dict[str, object]:
    """Inverse of :func:`validate_record`, in the wire field order."""
    raw: dict[str, object] = {
        "id": record.id,
        "task": record.task,
        "small_first_token": [[token, prob] for token, prob in record.small_first_token.entries],
        "small_answer": record.small_answer,
        "small_correct": record.small_correct,
        "large_answer": record.large_answer,
        "large_correct": record.large_correct,
        "small_cost": record.small_cost,
        "large_cost": record.large_cost,
    }
    for name in _OPTIONAL_SCORE_FIELDS:
        value = getattr(record, name)
        if value is not None:
            raw[name] = value
    if record.committee_answers is not None:
        raw["committee_answers"] = list(record.committee_answers)
    return raw


def validate_record(raw: Mapping[str, object] | ReplayRecord) -> ReplayRecord:
    """Validate a parsed record into an immutable :class:`ReplayRecord`.

    Idempotent: records that already validate map to an equal record. The
    only semantic change validation may apply is re-sorting the token
    distribution.
    """
    if isinstance(raw, ReplayRecord):
        raw = record_to_raw(raw)
    for name in _REQUIRED_FIELDS:
        if name not in raw:
            raise SchemaError(name)

    pairs = raw["small_first_token"]
    if not isinstance(pairs, Sequence) or isinstance(pairs, (str, bytes)):
        raise SchemaError("small_first_token", "must be an array of [token, prob] pairs")
    distribution = TokenDistribution.from_pairs(pairs)

    committee = raw.get("committee_answers")
    committee_answers: tuple[str, ...] | None = None
    if committee is not None:
        if not isinstance(committee, Sequence) or isinstance(committee, (str, bytes)):
            raise SchemaError("committee_answers", "must be an array of texts")
        if len(committee) == 0:
            raise RangeError("committee_answers must contain at least one answer")
        if not all(isinstance(answer, str) for answer in committee):
            raise SchemaError("committee_answers", "answers must be text")
        committee_answers = tuple(committee)

    return ReplayRecord(
        id=_require_text(raw, "id"),
        task=_require_text(raw, "task"),
        small_first_token=distribution,
        small_answer=_require_text(raw, "small_answer"),
        small_correct=_require_bool(raw, "small_correct"),
        large_answer=_require_text(raw, "large_answer"),
        large_correct=_require_bool(raw, "large_correct"),
        small_cost=_require_positive(raw, "small_cost"),
        large_cost=_require_positive(raw, "large_cost"),
        router_score=_optional_unit_interval(raw, "router_score"),
        hybrid_score=_optional_unit_interval(raw, "hybrid_score"),
        frugal_score=_optional_unit_interval(raw, "frugal_score"),
        committee_answers=committee_answers,
    )


def record_field_names() -> tuple[str, ...]:
    return tuple(f.name for f in fields(ReplayRecord))
