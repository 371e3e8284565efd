"""Confidence signals consumed by the calling strategies.

All functions are pure and stateless.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Sequence

from cascadegate.errors import EmptyCommitteeError
from cascadegate.records import TokenDistribution


def margin_first_token(dist: TokenDistribution) -> float:
    """Gap between the two most likely first-token probabilities.

    A single-entry (truncated) distribution treats the runner-up
    probability as 0, so the margin equals the top probability.
    """
    entries = dist.entries
    top = entries[0][1]
    second = entries[1][1] if len(entries) > 1 else 0.0
    return top - second


def quality_gap(p_small: float, p_large: float) -> float:
    """Small-model minus large-model probability of the same gold first token.

    Positive values mean the small model is the better bet. Exposed for
    dataset producers building hybrid-routing scores (they binarize this
    against its median); the engine itself only consumes the finished score.
    """
    return p_small - p_large


def committee_agreement(answers: Sequence[str]) -> float:
    """Vote share of the modal answer among sampled committee answers.

    Ranges in (0, 1]; 1.0 means unanimity. Ties between modes share the same
    count, so the result is well defined. Answer identity is exact string
    equality; producers are expected to pre-normalize.
    """
    if len(answers) == 0:
        raise EmptyCommitteeError("committee has no answers")
    (_, modal_count), = Counter(answers).most_common(1)
    return modal_count / len(answers)
