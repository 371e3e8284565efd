"""Pure-Python score buffer, the fallback when the compiled kernel is absent.

Semantics must stay bit-identical to ``_fastbuf.ScoreBuffer``: both keep the
scores in ascending order and evaluate the linear-interpolation quantile as

    h = p * (n - 1);  i = floor(h)
    value = v[i] + (h - i) * (v[i+1] - v[i])

with plain IEEE double arithmetic, so either backend yields the same floats.
"""

from __future__ import annotations

from bisect import insort
from math import floor

from cascadegate.errors import EmptySampleError


class ScoreBuffer:
    """Ascending multiset of float scores with O(1) interpolated quantiles."""

    __slots__ = ("_values",)

    def __init__(self) -> None:
        self._values: list[float] = []

    def __len__(self) -> int:
        return len(self._values)

    def push(self, score: float) -> None:
        insort(self._values, score)

    def replace_at(self, index: int, score: float) -> None:
        """Drop the index-th smallest stored score and insert a new one."""
        del self._values[index]
        insort(self._values, score)

    def quantile(self, p: float) -> float:
        values = self._values
        n = len(values)
        if n == 0:
            raise EmptySampleError("quantile of an empty score buffer")
        h = p * (n - 1)
        i = int(floor(h))
        if i + 1 >= n:
            return values[n - 1]
        return values[i] + (h - i) * (values[i + 1] - values[i])

    def values(self) -> list[float]:
        return list(self._values)
