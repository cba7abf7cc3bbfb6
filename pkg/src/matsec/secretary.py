"""Dynkin's single-choice threshold rule.

The rule watches the first ``floor(m/e)`` arrivals without choosing, then
takes the first arrival that beats all of them. It only compares keys, so
any totally ordered key works.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from typing import Any


def threshold_index(m: int) -> int:
    """Sample size ``floor(m/e)`` used for a part of ``m`` elements."""
    if m < 1:
        raise ValueError("threshold rule needs at least one element")
    return math.floor(m / math.e)


class ThresholdRule:
    """Online state of the rule for one part whose size is known up front."""

    def __init__(self, m: int, r: int | None = None):
        self.m = m
        self.r = threshold_index(m) if r is None else r
        self.seen = 0
        self.best = None
        self.selected = None

    @property
    def sampling(self) -> bool:
        return self.seen < self.r

    def offer(self, element: int, key: Any) -> bool:
        """Show the next arrival; returns True if it is selected now."""
        if self.seen >= self.m:
            raise RuntimeError(f"part of size {self.m} received more arrivals")
        self.seen += 1
        if self.selected is not None:
            return False
        if self.seen <= self.r:
            if self.best is None or key > self.best:
                self.best = key
            return False
        if self.best is None or key > self.best:
            self.selected = element
            return True
        return False


def run_threshold_rule(stream: Sequence[tuple[int, Any]], r: int | None = None):
    """Run the rule on a whole ``(element, key)`` stream; return the chosen element or None.

    ``r`` overrides the sample size, which defaults to ``threshold_index(len(stream))``.
    """
    if not stream:
        return None
    rule = ThresholdRule(len(stream), r)
    for element, key in stream:
        if rule.offer(element, key):
            return element
    return None


def success_probability(r: int, n: int) -> float:
    """Probability that sampling ``r`` of ``n`` random-order arrivals ends on the maximum."""
    if not 0 <= r < n:
        raise ValueError(f"need 0 <= r < n, got r={r}, n={n}")
    if r == 0:
        return 1.0 / n
    return r / n * math.fsum(1.0 / (j - 1) for j in range(r + 1, n + 1))

