"""Two-phase selection for the free order model, where the algorithm picks the reveal order.

Phase 1 puts every element into a sample ``A`` with probability 1/2 and
selects nothing from it. With ``a_1, ..., a_m`` the sample ranked best first,
phase 2 reveals the unsampled elements layer by layer: layer ``i`` holds the
elements that enter the span when ``a_i`` is added to ``a_1..a_{i-1}``, and
the elements outside the span of all of ``A`` come last. An element of layer
``i`` is accepted when it beats ``a_i`` and keeps the selection independent;
a tail element only needs to keep it independent.

Each element of the offline optimum ends up selected with probability at
least 1/4.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ElementOutOfRange
from .instance import Instance

INF = math.inf

PHASE2_MODES = ("schedule", "random")


@dataclass(frozen=True)
class SamplePhase:
    A: frozenset
    ranked: tuple[int, ...]  # A best first: a_1, ..., a_m

    @property
    def m(self) -> int:
        return len(self.ranked)

    def prefix(self, i: int) -> frozenset:
        """``A_i``, the ``i`` best sampled elements."""
        return frozenset(self.ranked[:i])


@dataclass(frozen=True)
class RevealSchedule:
    layers: tuple[tuple[int, ...], ...]  # layers[i - 1] is layer i, sorted by id
    tail: tuple[int, ...]

    def sequence(self) -> list[int]:
        return [f for layer in self.layers for f in layer] + list(self.tail)


@dataclass(frozen=True)
class FreeOrderRun:
    phase: SamplePhase
    schedule: RevealSchedule
    reveal_order: tuple[int, ...]
    output: frozenset


class JIndices(NamedTuple):
    """1-based positions in the weight order; ``INF`` when never spanned."""

    j1: float
    j2: float


def sample_phase(instance: Instance, rng: np.random.Generator | None = None,
                 forced: Iterable[int] | None = None) -> SamplePhase:
    if forced is None:
        if rng is None:
            raise ValueError("sample_phase needs an rng unless the sample is forced")
        A = frozenset(np.flatnonzero(rng.random(instance.n) < 0.5).tolist())
    else:
        A = frozenset(forced)
    return SamplePhase(A, tuple(sorted(A, key=instance.rank_of.__getitem__)))


def reveal_schedule(instance: Instance, phase: SamplePhase) -> RevealSchedule:
    """Layers of the phase-2 reveal order; uses the matroid structure and the sample only."""
    tracker = instance.matroid.span_tracker()
    A = phase.A
    layers = []
    for a in phase.ranked:
        layers.append(tuple(sorted(f for f in tracker.add(a) if f not in A)))
    tail = tuple(f for f in range(instance.n) if f not in A and not tracker.is_spanned(f))
    return RevealSchedule(tuple(layers), tail)


def simulate_free_order(instance: Instance, rng: np.random.Generator | None = None, *,
                        sample: Iterable[int] | None = None,
                        phase2_order: str = "schedule") -> FreeOrderRun:
    """Run the algorithm and keep the intermediate objects.

    ``phase2_order="random"`` reveals the unsampled elements in uniformly
    random order instead of the span layers, still accepting only good
    elements; it has no competitive guarantee and exists for comparison.
    """
    if phase2_order not in PHASE2_MODES:
        raise ValueError(f"free-order phase-2 order must be one of {PHASE2_MODES}, got {phase2_order!r}")
    phase = sample_phase(instance, rng, sample)
    schedule = reveal_schedule(instance, phase)
    rank_of = instance.rank_of
    # rank of the sampled element whose layer holds f; tail elements face no bar
    bar = {}
    for a, layer in zip(phase.ranked, schedule.layers):
        for f in layer:
            bar[f] = rank_of[a]
    if phase2_order == "schedule":
        reveal = schedule.sequence()
    else:
        if rng is None:
            raise ValueError("random phase-2 order needs an rng")
        reveal = [f for f in range(instance.n) if f not in phase.A]
        reveal = [reveal[i] for i in rng.permutation(len(reveal))]

    b = instance.matroid.builder()
    chosen = []
    for f in reveal:
        # comparisons against a_i only; a smaller rank means a heavier element
        if rank_of[f] < bar.get(f, instance.n) and b.can_add(f):
            b.add(f)
            chosen.append(f)
    return FreeOrderRun(phase, schedule, tuple(reveal), frozenset(chosen))


def run_free_order(instance: Instance, rng: np.random.Generator | None = None, *,
                   sample: Iterable[int] | None = None, phase2_order: str = "schedule") -> frozenset:
    return simulate_free_order(instance, rng, sample=sample, phase2_order=phase2_order).output


def j_indices(instance: Instance, A: Iterable[int], f: int) -> JIndices:
    """First weight-order prefix whose sampled part, and whose unsampled part, spans ``f``.

    ``j1`` is the least ``j`` with ``f`` in the span of ``(N_j ∩ A) - f`` and
    ``j2`` the least with ``f`` in the span of ``(N_j \\ A) - f``, where
    ``N_j`` is the set of the ``j`` heaviest elements.
    """
    if not 0 <= f < instance.n:
        raise ElementOutOfRange(f, instance.n)
    A = frozenset(A)
    inside, outside = instance.matroid.builder(), instance.matroid.builder()
    j1 = j2 = INF
    for j, e in enumerate(instance.order, start=1):
        if e != f:
            b = inside if e in A else outside
            if b.can_add(e):
                b.add(e)
        if j1 == INF and not inside.can_add(f):
            j1 = j
        if j2 == INF and not outside.can_add(f):
            j2 = j
        if j1 != INF and j2 != INF:
            break
    return JIndices(j1, j2)
