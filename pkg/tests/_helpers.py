"""Shared builders for test records and datasets."""

from __future__ import annotations

from cascadegate.records import ReplayRecord, validate_record


def raw_record(**overrides) -> dict:
    base = {
        "id": "r1",
        "task": "unit",
        "small_first_token": [["a", 0.7], ["b", 0.2], ["c", 0.1]],
        "small_answer": "a",
        "small_correct": True,
        "large_answer": "a",
        "large_correct": True,
        "small_cost": 1.0,
        "large_cost": 10.0,
    }
    base.update(overrides)
    return base


def record(**overrides) -> ReplayRecord:
    return validate_record(raw_record(**overrides))


def dist_for_margin(margin: float) -> list[list[object]]:
    """Two-entry distribution whose top-two gap is ``margin``."""
    top = (1.0 + margin) / 2.0
    return [["k1", top], ["k2", top - margin]]


def records_from_margins(
    margins,
    small_correct=None,
    large_correct=None,
    small_cost: float = 1.0,
    large_cost: float = 10.0,
) -> list[ReplayRecord]:
    """One record per margin; correctness defaults to small wrong, large right."""
    out = []
    for i, margin in enumerate(margins):
        out.append(
            record(
                id=f"m{i:05d}",
                small_first_token=dist_for_margin(margin),
                small_correct=bool(small_correct[i]) if small_correct is not None else False,
                large_correct=bool(large_correct[i]) if large_correct is not None else True,
                small_cost=small_cost,
                large_cost=large_cost,
            )
        )
    return out


def front_load_min_margin(records):
    """Swap the globally lowest-margin record into position 0.

    With the minimum inside the warm-up prefix, a p=0 threshold (the running
    minimum) can never fire post-warm-up, making the never-escalate endpoint
    exact rather than asymptotic.
    """
    from cascadegate.uncertainty import margin_first_token

    ordered = list(records)
    lowest = min(range(len(ordered)), key=lambda i: margin_first_token(ordered[i].small_first_token))
    ordered[0], ordered[lowest] = ordered[lowest], ordered[0]
    return ordered


def records_from_scores(
    scores,
    field: str = "router_score",
    small_correct=None,
    large_correct=None,
) -> list[ReplayRecord]:
    """One record per score value, stored in the given optional score field."""
    out = []
    for i, score in enumerate(scores):
        out.append(
            record(
                id=f"s{i:05d}",
                small_correct=bool(small_correct[i]) if small_correct is not None else True,
                large_correct=bool(large_correct[i]) if large_correct is not None else True,
                **{field: score},
            )
        )
    return out
