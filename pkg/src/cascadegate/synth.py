"""Synthetic replay datasets with a controllable margin-correctness link.

Margins are Beta-distributed (continuous scores keep the threshold
calibration property testable) and small-model correctness follows a
logistic link on the margin, so the signal strength is tunable from
uninformative (slope 0) to nearly deterministic. Also hosts the
budget-quota omniscient oracle used as an upper bound in acceptance tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import exp, floor

import numpy as np

from cascadegate.costs import cascade_probability
from cascadegate.errors import ParameterError
from cascadegate.records import CostScheme, ReplayRecord, validate_record


@dataclass(frozen=True, slots=True)
class SynthParams:
    """Generator knobs; defaults give a clearly informative margin signal."""

    margin_beta_a: float = 2.0
    margin_beta_b: float = 2.0
    link_slope: float = 4.0
    link_intercept: float = -1.0
    large_accuracy: float = 0.9
    vocab_size: int = 5
    score_noise: float = 0.75
    committee_samples: int = 5
    cost_small: float = 1.0
    cost_large: float = 10.0

    def __post_init__(self) -> None:
        if self.margin_beta_a <= 0.0 or self.margin_beta_b <= 0.0:
            raise ParameterError("beta shapes must be > 0")
        if not 0.0 <= self.large_accuracy <= 1.0:
            raise ParameterError("large_accuracy must be in [0, 1]")
        if self.vocab_size < 2:
            raise ParameterError("vocab_size must be >= 2")
        if self.score_noise < 0.0:
            raise ParameterError("score_noise must be >= 0")
        if self.committee_samples < 1:
            raise ParameterError("committee_samples must be >= 1")
        if self.cost_small <= 0.0 or self.cost_large <= self.cost_small:
            raise ParameterError("costs must satisfy 0 < cost_small < cost_large")


def _sigmoid(x: float) -> float:
    if x >= 0.0:
        return 1.0 / (1.0 + exp(-x))
    z = exp(x)
    return z / (1.0 + z)


def _first_token_probs(margin: float, vocab_size: int) -> list[float]:
    """A vocab_size-entry distribution whose top-two gap is exactly ``margin``.

    The tail mass (1 - margin) * (k - 2) / (2k) is spread evenly over the
    k - 2 trailing tokens; the choice keeps p2 >= tail entries for every
    k >= 2 and the whole distribution summing to 1.
    """
    k = vocab_size
    if k == 2:
        p2 = (1.0 - margin) / 2.0
        return [p2 + margin, p2]
    tail_each = (1.0 - margin) / (2.0 * k)
    p2 = (1.0 - margin) * (k + 2) / (4.0 * k)
    probs = [p2 + margin, p2]
    probs.extend(tail_each for _ in range(k - 2))
    return probs


def generate(n: int, seed: int, params: SynthParams | None = None) -> list[ReplayRecord]:
    """Generate ``n`` validated records; same seed means identical output."""
    if n <= 0:
        raise ParameterError(f"record count must be > 0, got {n!r}")
    params = params or SynthParams()
    rng = np.random.default_rng(seed)
    vocab = [f"tok{i}" for i in range(params.vocab_size)]
    records: list[ReplayRecord] = []
    for i in range(n):
        margin = float(rng.beta(params.margin_beta_a, params.margin_beta_b))
        probs = _first_token_probs(margin, params.vocab_size)
        p_correct = _sigmoid(params.link_slope * margin + params.link_intercept)
        small_correct = bool(rng.random() < p_correct)
        large_correct = bool(rng.random() < params.large_accuracy)
        committee_idx = rng.choice(params.vocab_size, size=params.committee_samples, p=probs)
        committee = [vocab[j] for j in committee_idx]

        def noisy_score() -> float:
            logit = params.link_slope * margin + params.link_intercept
            if params.score_noise > 0.0:
                logit += float(rng.normal(0.0, params.score_noise))
            return _sigmoid(logit)

        raw = {
            "id": f"q{i:06d}",
            "task": "synthetic",
            "small_first_token": [[vocab[j], probs[j]] for j in range(params.vocab_size)],
            "small_answer": vocab[0],
            "small_correct": small_correct,
            "large_answer": "ref",
            "large_correct": large_correct,
            "small_cost": params.cost_small,
            "large_cost": params.cost_large,
            "router_score": noisy_score(),
            "hybrid_score": noisy_score(),
            "frugal_score": noisy_score(),
            "committee_answers": committee,
        }
        records.append(validate_record(raw))
    return records


def oracle_cascade_accuracy(
    records: list[ReplayRecord], scheme: CostScheme, budget: float
) -> float:
    """Best achievable cascade accuracy at a budget, by exhaustive counting.

    The escalation quota is floor(p_c * n); spending it on queries where the
    small model is wrong and the large model is right (all equally valuable)
    is optimal, so the maximum is a count, not a search.
    """
    p_c = cascade_probability(budget, scheme)
    n = len(records)
    quota = floor(p_c * n)
    base_correct = sum(1 for r in records if r.small_correct)
    fixable = sum(1 for r in records if not r.small_correct and r.large_correct)
    return (base_correct + min(quota, fixable)) / n
