"""Random-order secretary algorithms for laminar matroids via unitary partition matroids.

Both algorithms observe a random sample ``A`` (each element with probability
``2/3`` or ``q``), compute the sample optimum ``OPT_A``, and cut the unsampled
elements into parts so that choosing at most one element per part is always
independent. Phase 2 runs one threshold rule per part.

Positions refer to the consecutive layout of the laminar tree, in which every
set of the family is a contiguous run of positions. Functions that take or
return positions say so; everything else speaks element ids.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .instance import Instance, greedy_max_weight
from .matroids import LaminarMatroid
from .secretary import ThresholdRule
from .tree import LaminarTree

SIMPLE_SAMPLE_PROB = 2 / 3
IMPROVED_SAMPLE_PROB = 1 / math.sqrt(3)

PHASE2_ORDERS = ("random", "adversarial-id", "reversed", "opt-last")


class EmptySampleOptimum(ValueError):
    """The odd/even split is undefined when the sample optimum is empty."""


@dataclass(frozen=True)
class ConsecutiveOrder:
    element: tuple[int, ...]  # element at each position
    position: tuple[int, ...]  # position of each element


@dataclass(frozen=True)
class PartitionScheme:
    parts: tuple[frozenset, ...]
    kind: str  # "odd", "even", "interval" or "whole"
    anchors: tuple = ()  # interval schemes: the element of I owning each part

    def part_index(self, n: int) -> list[int]:
        idx = [-1] * n
        for i, part in enumerate(self.parts):
            for e in part:
                idx[e] = i
        return idx

    def __len__(self):
        return len(self.parts)


@dataclass(frozen=True)
class LaminarRun:
    sample: frozenset
    opt_sample: tuple[int, ...]
    scheme: PartitionScheme
    output: frozenset
    coin: bool | None = None  # True picks the odd family


def consecutive_order(tree: LaminarTree) -> ConsecutiveOrder:
    return ConsecutiveOrder(tuple(tree.order), tuple(tree.position))


def odd_even_parts(n: int, sample: Iterable[int], opt_sample: Iterable[int]):
    """Split positions ``0..n-1`` outside ``sample`` at the positions of ``opt_sample``.

    With the optimum at 1-based positions ``i_1 < ... < i_p`` and ``i_0 = 0``,
    ``i_{p+1} = n``, part ``j`` holds the unsampled positions between
    ``i_{j-1}`` and ``i_j`` inclusive. Returns ``(odd, even)`` lists of
    frozensets of 0-based positions with empty parts dropped.
    """
    cuts = sorted(p + 1 for p in opt_sample)
    if not cuts:
        raise EmptySampleOptimum("sample optimum is empty; use the whole unsampled set")
    sample = set(sample)
    bounds = [0] + cuts + [n]
    odd, even = [], []
    for j in range(1, len(bounds)):
        part = frozenset(k - 1 for k in range(max(bounds[j - 1], 1), bounds[j] + 1) if k - 1 not in sample)
        if part:
            (odd if j % 2 else even).append(part)
    return odd, even


def interval_partition(I: Iterable[int], tree: LaminarTree) -> PartitionScheme:
    """Partition the ground set into one block per element of the independent set ``I``.

    Element ``f_i`` looks at the smallest set ``L`` holding it that meets
    ``I``, and joins the block of the last member of ``L ∩ I`` at or before
    position ``i``, or failing that the first one after it. Since ``L`` is an
    interval this is simply the nearest member of ``I`` on the left if that one
    lies inside ``L``, else the nearest on the right.
    """
    I = frozenset(I)
    n = tree.n
    if not LaminarMatroid(tree).is_independent(I):
        raise ValueError("interval_partition needs an independent set")
    if not I:
        return PartitionScheme((frozenset(range(n)),), "whole", (None,))

    pos, order = tree.position, tree.order
    in_i = [False] * n
    for e in I:
        in_i[pos[e]] = True
    prefix = [0] * (n + 1)
    for p in range(n):
        prefix[p + 1] = prefix[p] + in_i[p]
    prev = [-1] * n
    last = -1
    for p in range(n):
        if in_i[p]:
            last = p
        prev[p] = last
    nxt = [n] * n
    following = n
    for p in range(n - 1, -1, -1):
        nxt[p] = following
        if in_i[p]:
            following = p

    lo, hi, parent = tree.lo, tree.hi, tree.parent
    # deepest set meeting I on the path from each node to the root
    lowest = [0] * tree.num_nodes
    for v in range(tree.num_nodes):
        meets = prefix[hi[v]] - prefix[lo[v]] > 0
        lowest[v] = v if meets or parent[v] < 0 else lowest[parent[v]]

    blocks: dict[int, list[int]] = {}
    for p in range(n):
        L = lowest[tree.elem_node[order[p]]]
        anchor = prev[p] if prev[p] >= lo[L] else nxt[p]
        blocks.setdefault(anchor, []).append(order[p])
    anchors = sorted(blocks)
    return PartitionScheme(
        tuple(frozenset(blocks[a]) for a in anchors), "interval", tuple(order[a] for a in anchors)
    )


def _require_laminar(instance: Instance) -> LaminarTree:
    if not isinstance(instance.matroid, LaminarMatroid):
        raise ValidationError("laminar algorithms need a laminar matroid instance")
    return instance.matroid.tree


def _arrivals(instance, rng, prob, sample, arrival, phase2_order):
    """Sample set and phase-2 arrival sequence."""
    n = instance.n
    if sample is None:
        if rng is None:
            raise ValueError("a random sample needs an rng")
        perm = rng.permutation(n).tolist()
        k = int(rng.binomial(n, prob))
        A = frozenset(perm[:k])
        rest = perm[k:]
    else:
        A = frozenset(sample)
        if arrival is not None:
            rest = [e for e in arrival if e not in A]
            if sorted(rest) != [e for e in range(n) if e not in A]:
                raise ValueError("arrival must list every unsampled element exactly once")
            return A, rest
        base = rng.permutation(n).tolist() if rng is not None else range(n)
        rest = [e for e in base if e not in A]
    if phase2_order == "random":
        return A, rest
    if phase2_order == "adversarial-id":
        return A, sorted(rest)
    if phase2_order == "reversed":
        # lightest first: every new arrival tends to beat the sampled best
        return A, sorted(rest, key=instance.rank_of.__getitem__, reverse=True)
    if phase2_order == "opt-last":
        opt = set(instance.opt)
        return A, [e for e in rest if e not in opt] + [e for e in rest if e in opt]
    raise ValueError(f"phase-2 order must be one of {PHASE2_ORDERS}, got {phase2_order!r}")


def _phase_two(instance, scheme, rest):
    idx = scheme.part_index(instance.n)
    rules = [ThresholdRule(len(p)) for p in scheme.parts]
    rank_of = instance.rank_of
    chosen = []
    for e in rest:
        i = idx[e]
        # elements of unchosen parts are consumed and discarded
        if i >= 0 and rules[i].offer(e, -rank_of[e]):
            chosen.append(e)
    return frozenset(chosen)


def simple_scheme(instance: Instance, A: frozenset, opt_a: Sequence[int], coin: bool) -> PartitionScheme:
    tree = _require_laminar(instance)
    if not opt_a:
        rest = frozenset(range(instance.n)) - A
        return PartitionScheme((rest,) if rest else (), "whole")
    pos, order = tree.position, tree.order
    odd, even = odd_even_parts(instance.n, (pos[e] for e in A), (pos[e] for e in opt_a))
    family = odd if coin else even
    return PartitionScheme(
        tuple(frozenset(order[p] for p in part) for part in family), "odd" if coin else "even"
    )


def improved_scheme(instance: Instance, A: frozenset, opt_a: Sequence[int]) -> PartitionScheme:
    tree = _require_laminar(instance)
    full = interval_partition(opt_a, tree)
    parts, anchors = [], []
    for part, anchor in zip(full.parts, full.anchors):
        part = part - A
        if part:
            parts.append(part)
            anchors.append(anchor)
    return PartitionScheme(tuple(parts), full.kind, tuple(anchors))


def simulate_simple_laminar(instance: Instance, rng: np.random.Generator | None = None, *,
                            sample: Iterable[int] | None = None, coin: bool | None = None,
                            arrival: Sequence[int] | None = None,
                            phase2_order: str = "random") -> LaminarRun:
    """Odd/even algorithm with the run's intermediate objects.

    ``sample``, ``coin`` and ``arrival`` force the corresponding random choices.
    """
    _require_laminar(instance)
    A, rest = _arrivals(instance, rng, SIMPLE_SAMPLE_PROB, sample, arrival, phase2_order)
    opt_a = greedy_max_weight(instance, A)
    if opt_a and coin is None:
        if rng is None:
            raise ValueError("the odd/even coin needs an rng")
        coin = bool(rng.random() < 0.5)
    scheme = simple_scheme(instance, A, opt_a, bool(coin))
    return LaminarRun(A, opt_a, scheme, _phase_two(instance, scheme, rest), coin if opt_a else None)


def simulate_improved_laminar(instance: Instance, rng: np.random.Generator | None = None,
                              q: float = IMPROVED_SAMPLE_PROB, *,
                              sample: Iterable[int] | None = None,
                              arrival: Sequence[int] | None = None,
                              phase2_order: str = "random") -> LaminarRun:
    _require_laminar(instance)
    if not 0 < q < 1:
        raise ValueError(f"sample probability must lie in (0, 1), got {q}")
    A, rest = _arrivals(instance, rng, q, sample, arrival, phase2_order)
    opt_a = greedy_max_weight(instance, A)
    scheme = improved_scheme(instance, A, opt_a)
    return LaminarRun(A, opt_a, scheme, _phase_two(instance, scheme, rest))


def run_simple_laminar(instance: Instance, rng: np.random.Generator | None = None, **kwargs) -> frozenset:
    return simulate_simple_laminar(instance, rng, **kwargs).output


def run_improved_laminar(instance: Instance, rng: np.random.Generator | None = None,
                         q: float = IMPROVED_SAMPLE_PROB, **kwargs) -> frozenset:
    return simulate_improved_laminar(instance, rng, q, **kwargs).output
