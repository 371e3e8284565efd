"""Deterministic replay of a recorded query stream through a policy.

Also owns the on-disk dataset format: newline-delimited JSON, one record per
line, field names exactly as in :class:`~cascadegate.records.ReplayRecord`
with ``small_first_token`` as an array of ``[token, prob]`` pairs. Reals are
serialized in decimal with full precision, booleans as true/false.
"""

from __future__ import annotations

import json
import random
from collections.abc import Sequence
from pathlib import Path

from cascadegate.errors import (
    CascadeGateError,
    DatasetParseError,
    EmptyDatasetError,
    InsufficientDataError,
)
from cascadegate.policy import PolicyConfig, make_policy
from cascadegate.records import (
    DecisionRow,
    ReplayRecord,
    RunTrace,
    record_to_raw,
    validate_record,
)


def load_dataset(path: str | Path) -> list[ReplayRecord]:
    """Read and validate a dataset file; file order is arrival order."""
    records: list[ReplayRecord] = []
    with open(path, "r", encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetParseError(line_number, str(exc)) from exc
            if not isinstance(raw, dict):
                raise DatasetParseError(line_number, "record is not an object")
            try:
                records.append(validate_record(raw))
            except CascadeGateError as exc:
                record_id = raw.get("id", "<missing id>")
                raise type(exc)(
                    f"line {line_number} (id={record_id!r}): {exc}"
                ) from exc
    if not records:
        raise EmptyDatasetError(f"dataset {path} contains no records")
    return records


def dump_dataset(records: Sequence[ReplayRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record_to_raw(record)))
            handle.write("\n")


def shuffle_records(records: Sequence[ReplayRecord], seed: int) -> list[ReplayRecord]:
    """Seeded shuffle, for simulating i.i.d. arrival from a sorted file."""
    shuffled = list(records)
    random.Random(seed).shuffle(shuffled)
    return shuffled


def run_replay(
    records: Sequence[ReplayRecord],
    config: PolicyConfig,
    include_warmup_cost: bool = False,
) -> RunTrace:
    """Stream records in order through a fresh policy instance.

    Warm-up rows are flagged and excluded from accuracy and total cost;
    ``include_warmup_cost`` folds their cost back in for sensitivity
    analysis (accuracy stays post-warm-up either way).
    """
    if len(records) == 0:
        raise EmptyDatasetError("replay needs at least one record")
    if len(records) <= config.warmup_target:
        raise InsufficientDataError(
            f"dataset has {len(records)} records; need more than the "
            f"warm-up target of {config.warmup_target}"
        )
    policy = make_policy(config)
    rows: list[DecisionRow] = []
    total_cost = 0.0
    warmup_cost = 0.0
    correct = 0
    evaluated = 0
    for record in records:
        decision = policy.decide(record)
        rows.append(
            DecisionRow(
                record_id=record.id,
                called_large=decision.call_large,
                answered_correctly=decision.final_answer_correct,
                incurred_cost=decision.incurred_cost,
                was_warmup=decision.was_warmup,
            )
        )
        if decision.was_warmup:
            warmup_cost += decision.incurred_cost
        else:
            evaluated += 1
            total_cost += decision.incurred_cost
            if decision.final_answer_correct:
                correct += 1
    if include_warmup_cost:
        total_cost += warmup_cost
    return RunTrace(
        decisions=tuple(rows),
        warmup_count=config.warmup_target,
        total_cost=total_cost,
        evaluated_queries=evaluated,
        accuracy=correct / evaluated,
    )


def write_trace(trace: RunTrace, path: str | Path) -> None:
    """Write one decision per line, same NDJSON discipline as datasets."""
    with open(path, "w", encoding="utf-8") as handle:
        for row in trace.decisions:
            handle.write(
                json.dumps(
                    {
                        "id": row.record_id,
                        "called_large": row.called_large,
                        "answered_correctly": row.answered_correctly,
                        "incurred_cost": row.incurred_cost,
                        "was_warmup": row.was_warmup,
                    }
                )
            )
            handle.write("\n")
