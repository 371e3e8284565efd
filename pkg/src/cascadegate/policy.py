"""Calling strategies and the dynamic decision threshold.

Six strategies share one decision interface. The three routing strategies
pick exactly one model per query; the three cascading strategies always
consult the small model and escalate when its confidence signal falls below
a dynamic threshold.

The threshold is the running p-quantile of every score seen so far. It is
seeded on a warm-up prefix (default 10 queries) during which no escalation
decisions are made, and each decision uses the quantile of strictly earlier
scores: decide first, then absorb the current score. Comparison direction is
uniform and strict - ``score < threshold`` escalates, ties keep the small
model - so the cheaper option wins ties and the rule is deterministic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import floor
from typing import Callable

from cascadegate import _kernel
from cascadegate.errors import (
    ConfigError,
    EmptySampleError,
    MissingSignalError,
    RangeError,
)
from cascadegate.records import ReplayRecord
from cascadegate.uncertainty import committee_agreement, margin_first_token

RANDOM_ROUTING = "random_routing"
SCORE_ROUTING = "score_routing"
HYBRID_ROUTING = "hybrid_routing"
FRUGAL_CASCADE = "frugal_cascade"
MARGIN_CASCADE = "margin_cascade"
COMMITTEE_CASCADE = "committee_cascade"

DEFAULT_WARMUP = 10

# Committee strategies sample the small model this many times per query and
# pay for every call.
COMMITTEE_SAMPLES = 5


def quantile_linear(values: list[float] | tuple[float, ...], p: float) -> float:
    """Linear-interpolation quantile of a sample (closest-ranks method).

    Sorts ascending and interpolates at rank ``p * (n - 1)``. Continuous in
    p, which keeps the threshold from flapping as the sample grows.
    """
    n = len(values)
    if n == 0:
        raise EmptySampleError("quantile of an empty sample")
    if not 0.0 <= p <= 1.0:
        raise RangeError(f"quantile fraction {p!r} outside [0, 1]")
    ordered = sorted(values)
    h = p * (n - 1)
    i = int(floor(h))
    if i + 1 >= n:
        return ordered[n - 1]
    return ordered[i] + (h - i) * (ordered[i + 1] - ordered[i])


class DynamicThreshold:
    """Running p-quantile of observed confidence scores.

    Undefined (None) until ``warmup_target`` scores have been observed;
    afterwards it always equals the quantile of every score seen so far.

    ``score_cap`` bounds memory with a seeded algorithm-R reservoir: once
    the cap is reached, each new score replaces a uniformly random stored
    one with probability cap/seen. The threshold then tracks the quantile
    of the reservoir rather than of the full history, so the cap is only
    for long-lived gateway deployments; replays default to unbounded.
    """

    __slots__ = ("p", "warmup_target", "score_cap", "seen", "_buffer", "_cap_rng")

    def __init__(
        self,
        p: float,
        warmup_target: int = DEFAULT_WARMUP,
        score_cap: int | None = None,
        cap_seed: int = 0,
    ) -> None:
        if not 0.0 <= p <= 1.0:
            raise RangeError(f"quantile fraction {p!r} outside [0, 1]")
        if warmup_target < 1:
            raise ConfigError(f"warmup_target must be >= 1, got {warmup_target!r}")
        if score_cap is not None and score_cap < warmup_target:
            raise ConfigError(
                f"score_cap ({score_cap!r}) must be >= warmup_target ({warmup_target!r})"
            )
        self.p = p
        self.warmup_target = warmup_target
        self.score_cap = score_cap
        self.seen = 0
        self._buffer = _kernel.ScoreBuffer()
        self._cap_rng = random.Random(cap_seed) if score_cap is not None else None

    @property
    def warming_up(self) -> bool:
        return self.seen < self.warmup_target

    @property
    def current_threshold(self) -> float | None:
        if self.warming_up:
            return None
        return self._buffer.quantile(self.p)

    def observe(self, score: float) -> None:
        self.seen += 1
        cap = self.score_cap
        if cap is not None and len(self._buffer) >= cap:
            slot = self._cap_rng.randrange(self.seen)
            if slot < cap:
                self._buffer.replace_at(slot, score)
            return
        self._buffer.push(score)

    def observed_scores(self) -> list[float]:
        """Stored scores in ascending order (full history unless capped)."""
        return self._buffer.values()


@dataclass(frozen=True, slots=True)
class PolicyConfig:
    """One strategy plus the knobs that make a run reproducible.

    ``probability`` is the large-call probability of the strategy's family
    (p_r for routing, p_c for cascading). ``seed`` only drives
    random_routing's Bernoulli draws.
    """

    strategy: str
    probability: float
    seed: int = 0
    warmup_target: int = DEFAULT_WARMUP
    score_cap: int | None = None

    def __post_init__(self) -> None:
        if self.strategy not in STRATEGIES:
            raise ConfigError(
                f"unknown strategy {self.strategy!r}; expected one of {sorted(STRATEGIES)}"
            )
        if not 0.0 <= self.probability <= 1.0:
            raise RangeError(f"probability {self.probability!r} outside [0, 1]")


@dataclass(frozen=True, slots=True)
class Decision:
    call_large: bool
    final_answer_correct: bool
    incurred_cost: float
    was_warmup: bool


def _score_field(strategy: str, field: str) -> Callable[[ReplayRecord], float]:
    def score(record: ReplayRecord) -> float:
        value = getattr(record, field)
        if value is None:
            raise MissingSignalError(strategy, field)
        return value

    return score


def _margin_score(record: ReplayRecord) -> float:
    return margin_first_token(record.small_first_token)


def _committee_score(record: ReplayRecord) -> float:
    if record.committee_answers is None:
        raise MissingSignalError(COMMITTEE_CASCADE, "committee_answers")
    return committee_agreement(record.committee_answers)


@dataclass(frozen=True, slots=True)
class StrategySpec:
    name: str
    family: str
    score: Callable[[ReplayRecord], float] | None
    required_field: str | None
    small_calls: int = 1


STRATEGIES: dict[str, StrategySpec] = {
    RANDOM_ROUTING: StrategySpec(RANDOM_ROUTING, "routing", None, None),
    SCORE_ROUTING: StrategySpec(
        SCORE_ROUTING, "routing", _score_field(SCORE_ROUTING, "router_score"), "router_score"
    ),
    HYBRID_ROUTING: StrategySpec(
        HYBRID_ROUTING, "routing", _score_field(HYBRID_ROUTING, "hybrid_score"), "hybrid_score"
    ),
    FRUGAL_CASCADE: StrategySpec(
        FRUGAL_CASCADE, "cascading", _score_field(FRUGAL_CASCADE, "frugal_score"), "frugal_score"
    ),
    MARGIN_CASCADE: StrategySpec(MARGIN_CASCADE, "cascading", _margin_score, None),
    COMMITTEE_CASCADE: StrategySpec(
        COMMITTEE_CASCADE,
        "cascading",
        _committee_score,
        "committee_answers",
        small_calls=COMMITTEE_SAMPLES,
    ),
}

CASCADE_STRATEGIES = tuple(s for s, spec in STRATEGIES.items() if spec.family == "cascading")
ROUTING_STRATEGIES = tuple(s for s, spec in STRATEGIES.items() if spec.family == "routing")


def strategy_family(strategy: str) -> str:
    return STRATEGIES[strategy].family


def small_call_multiplier(strategy: str) -> int:
    return STRATEGIES[strategy].small_calls


class Policy:
    """Stateful decision machine for one run.

    Requires exclusive access per decision; independent runs are
    embarrassingly parallel. All strategies treat the first
    ``warmup_target`` queries as calibration: the small model answers,
    no escalation happens, and callers exclude those rows from aggregates.
    """

    def __init__(self, config: PolicyConfig) -> None:
        self.config = config
        self.spec = STRATEGIES[config.strategy]
        self._decided = 0
        self._rng: random.Random | None = None
        self._threshold: DynamicThreshold | None = None
        if config.strategy == RANDOM_ROUTING:
            self._rng = random.Random(config.seed)
        else:
            self._threshold = DynamicThreshold(
                p=config.probability,
                warmup_target=config.warmup_target,
                score_cap=config.score_cap,
                cap_seed=config.seed,
            )

    @property
    def current_threshold(self) -> float | None:
        if self._threshold is None:
            return None
        return self._threshold.current_threshold

    def decide(self, record: ReplayRecord) -> Decision:
        spec = self.spec
        if spec.score is None:
            # Random routing: no signal, pure Bernoulli after warm-up. Draws
            # happen only post-warm-up so the seed maps 1:1 to evaluated rows.
            warmup = self._decided < self.config.warmup_target
            self._decided += 1
            call_large = False if warmup else self._rng.random() < self.config.probability
        else:
            score = spec.score(record)
            state = self._threshold
            warmup = state.warming_up
            call_large = (not warmup) and score < state.current_threshold
            state.observe(score)
            self._decided += 1

        if spec.family == "routing":
            # Warm-up rows are answered by the score-producing path, which we
            # account as the small model's answer and cost.
            cost = record.large_cost if call_large else record.small_cost
        else:
            cost = spec.small_calls * record.small_cost
            if call_large:
                cost += record.large_cost
        correct = record.large_correct if call_large else record.small_correct
        return Decision(
            call_large=call_large,
            final_answer_correct=correct,
            incurred_cost=cost,
            was_warmup=warmup,
        )


def make_policy(config: PolicyConfig) -> Policy:
    return Policy(config)
