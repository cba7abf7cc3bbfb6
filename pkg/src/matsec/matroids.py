"""Matroid oracles: independence, rank and span over the ground set ``range(n)``.

Each concrete matroid supplies two incremental helpers:

* a *builder*, which grows an independent set one element at a time and
  answers ``can_add`` in time proportional to the structure (a counter per
  laminar set, a union-find for graphs);
* a *span tracker*, which grows an independent set and reports which
  elements enter its span at each step.

``rank`` and ``span`` are computed greedily on top of the builder. The
generic fallbacks :func:`greedy_rank` and :class:`GenericSpanTracker` use
only ``is_independent`` and exist so the specialised code can be cross-checked.
"""

from __future__ import annotations

import abc
from collections.abc import Iterable, Sequence

from .errors import DanglingElement, ElementOutOfRange, ValidationError
from .tree import LaminarTree


class UnionFind:
    """Disjoint sets over ``range(n)`` with path halving and union by size."""

    def __init__(self, n):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x):
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, x, y):
        """Merge the sets of ``x`` and ``y``; False if they were already one."""
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if self.size[rx] < self.size[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        self.size[rx] += self.size[ry]
        return True


class Matroid(abc.ABC):
    n: int
    kind: str = "abstract"

    @abc.abstractmethod
    def builder(self):
        """Return a fresh incremental builder starting from the empty set."""

    def span_tracker(self):
        return GenericSpanTracker(self)

    @abc.abstractmethod
    def to_dict(self) -> dict:
        """JSON-ready description, the ``matroid`` field of an instance file."""

    def _elements(self, S: Iterable[int]) -> list[int]:
        elems = sorted(set(S))
        if elems and (elems[0] < 0 or elems[-1] >= self.n):
            bad = elems[0] if elems[0] < 0 else elems[-1]
            raise ElementOutOfRange(bad, self.n)
        return elems

    def is_independent(self, S: Iterable[int]) -> bool:
        b = self.builder()
        for e in self._elements(S):
            if not b.can_add(e):
                return False
            b.add(e)
        return True

    def rank(self, S: Iterable[int]) -> int:
        b = self.builder()
        r = 0
        for e in self._elements(S):
            if b.can_add(e):
                b.add(e)
                r += 1
        return r

    def span(self, S: Iterable[int]) -> frozenset:
        elems = self._elements(S)
        b = self.builder()
        for e in elems:
            if b.can_add(e):
                b.add(e)
        inside = set(elems)
        return frozenset(inside | {f for f in range(self.n) if f not in inside and not b.can_add(f)})


def greedy_rank(matroid: Matroid, S: Iterable[int]) -> int:
    """Rank computed with nothing but the independence oracle."""
    basis: list[int] = []
    for e in sorted(set(S)):
        if matroid.is_independent(basis + [e]):
            basis.append(e)
    return len(basis)


class GenericSpanTracker:
    """Span tracker that rescans every unspanned element after each addition."""

    def __init__(self, matroid: Matroid):
        self._builder = matroid.builder()
        self._unspanned = set(range(matroid.n))
        self.basis: list[int] = []

    def is_spanned(self, e: int) -> bool:
        return e not in self._unspanned

    def add(self, e: int) -> list[int]:
        """Add ``e`` if it is not already spanned; return the newly spanned elements."""
        if e not in self._unspanned:
            return []
        self._builder.add(e)
        self.basis.append(e)
        self._unspanned.discard(e)
        newly = [e]
        for f in sorted(self._unspanned):
            if not self._builder.can_add(f):
                newly.append(f)
        self._unspanned.difference_update(newly)
        return newly


class _CountBuilder:
    def __init__(self, k):
        self.k = k
        self.count = 0

    def can_add(self, e):
        return self.count < self.k

    def add(self, e):
        self.count += 1


class UniformMatroid(Matroid):
    kind = "uniform"

    def __init__(self, n: int, k: int):
        if n > 0 and k < 1:
            raise ValidationError(f"uniform rank must be >= 1, got {k}")
        self.n = n
        self.k = k

    def builder(self):
        return _CountBuilder(self.k)

    def span_tracker(self):
        return _UniformSpanTracker(self)

    def rank(self, S):
        return min(len(self._elements(S)), self.k)

    def to_dict(self):
        return {"type": "uniform", "rank": self.k}

    def __repr__(self):
        return f"UniformMatroid(n={self.n}, k={self.k})"


class _UniformSpanTracker:
    def __init__(self, m: UniformMatroid):
        self.k = m.k
        self.basis: list[int] = []
        self._unspanned = set(range(m.n))

    def is_spanned(self, e):
        return e not in self._unspanned

    def add(self, e):
        if e not in self._unspanned:
            return []
        self.basis.append(e)
        self._unspanned.discard(e)
        if len(self.basis) < self.k:
            return [e]
        newly = [e] + sorted(self._unspanned)
        self._unspanned.clear()
        return newly


class _PartitionBuilder:
    def __init__(self, part_of, capacities):
        self.part_of = part_of
        self.capacities = capacities
        self.count = [0] * len(capacities)

    def can_add(self, e):
        p = self.part_of[e]
        return p < 0 or self.count[p] < self.capacities[p]

    def add(self, e):
        p = self.part_of[e]
        if p >= 0:
            self.count[p] += 1


class PartitionMatroid(Matroid):
    """Disjoint parts, each with a capacity; elements in no part are unconstrained."""

    kind = "partition"

    def __init__(self, n: int, parts: Sequence[Iterable[int]], capacities: Sequence[int]):
        if len(parts) != len(capacities):
            raise ValidationError("partition needs one capacity per part")
        self.n = n
        self.parts = [tuple(sorted(set(p))) for p in parts]
        self.capacities = [int(c) for c in capacities]
        self.part_of = [-1] * n
        for i, (part, cap) in enumerate(zip(self.parts, self.capacities)):
            if cap < 1:
                raise ValidationError(f"partition capacity must be >= 1, got {cap}")
            for e in part:
                if not 0 <= e < n:
                    raise DanglingElement(f"partition part references element {e} outside [0, {n})")
                if self.part_of[e] >= 0:
                    raise ValidationError(f"element {e} appears in two partition parts")
                self.part_of[e] = i

    def builder(self):
        return _PartitionBuilder(self.part_of, self.capacities)

    def span_tracker(self):
        return _PartitionSpanTracker(self)

    def rank(self, S):
        count = [0] * len(self.parts)
        r = 0
        for e in self._elements(S):
            p = self.part_of[e]
            if p < 0:
                r += 1
            elif count[p] < self.capacities[p]:
                count[p] += 1
                r += 1
        return r

    def to_dict(self):
        return {
            "type": "partition",
            "parts": [{"members": list(p), "capacity": c} for p, c in zip(self.parts, self.capacities)],
        }

    def __repr__(self):
        return f"PartitionMatroid(n={self.n}, parts={len(self.parts)})"


class _PartitionSpanTracker:
    def __init__(self, m: PartitionMatroid):
        self.m = m
        self.basis: list[int] = []
        self._builder = m.builder()
        self._spanned = [False] * m.n

    def is_spanned(self, e):
        return self._spanned[e]

    def add(self, e):
        if self._spanned[e]:
            return []
        self._builder.add(e)
        self.basis.append(e)
        self._spanned[e] = True
        newly = [e]
        p = self.m.part_of[e]
        if p >= 0 and self._builder.count[p] == self.m.capacities[p]:
            for f in self.m.parts[p]:
                if not self._spanned[f]:
                    self._spanned[f] = True
                    newly.append(f)
        return newly


class _GraphicBuilder:
    def __init__(self, edges, num_vertices):
        self.edges = edges
        self.uf = UnionFind(num_vertices)

    def can_add(self, e):
        u, v = self.edges[e]
        return self.uf.find(u) != self.uf.find(v)

    def add(self, e):
        u, v = self.edges[e]
        self.uf.union(u, v)


class GraphicMatroid(Matroid):
    """Cycle matroid of a multigraph; element ``i`` is edge ``edges[i]``."""

    kind = "graphic"

    def __init__(self, edges: Sequence[Sequence[int]], num_vertices: int | None = None):
        self.edges = [(int(u), int(v)) for u, v in edges]
        self.n = len(self.edges)
        top = max((max(u, v) for u, v in self.edges), default=-1) + 1
        self.num_vertices = top if num_vertices is None else int(num_vertices)
        for i, (u, v) in enumerate(self.edges):
            if u == v:
                raise ValidationError(f"edge {i} is a self-loop at vertex {u}")
            if min(u, v) < 0 or max(u, v) >= self.num_vertices:
                raise ValidationError(f"edge {i} uses a vertex outside [0, {self.num_vertices})")

    def builder(self):
        return _GraphicBuilder(self.edges, self.num_vertices)

    def span_tracker(self):
        return _GraphicSpanTracker(self)

    def to_dict(self):
        return {"type": "graphic", "edges": [list(e) for e in self.edges], "vertices": self.num_vertices}

    def __repr__(self):
        return f"GraphicMatroid(vertices={self.num_vertices}, edges={self.n})"


class _GraphicSpanTracker:
    """An edge is spanned once its endpoints share a component.

    Each component keeps the list of its incident edges; on a merge only the
    smaller list is rescanned, so the total work is O(m log m).
    """

    def __init__(self, m: GraphicMatroid):
        self.edges = m.edges
        self.uf = UnionFind(m.num_vertices)
        self.basis: list[int] = []
        self._spanned = [False] * m.n
        self._incident: dict[int, list[int]] = {}
        for i, (u, v) in enumerate(m.edges):
            self._incident.setdefault(u, []).append(i)
            self._incident.setdefault(v, []).append(i)

    def is_spanned(self, e):
        return self._spanned[e]

    def add(self, e):
        if self._spanned[e]:
            return []
        u, v = self.edges[e]
        ru, rv = self.uf.find(u), self.uf.find(v)
        small = self._incident.pop(ru, [])
        big = self._incident.pop(rv, [])
        if len(small) > len(big):
            small, big = big, small
        self.uf.union(u, v)
        self.basis.append(e)
        self._spanned[e] = True
        newly = [e]
        find = self.uf.find
        for f in small:
            if self._spanned[f]:
                continue
            a, b = self.edges[f]
            if find(a) == find(b):
                self._spanned[f] = True
                newly.append(f)
            else:
                big.append(f)
        self._incident[find(u)] = big
        return newly


class _LaminarBuilder:
    def __init__(self, tree: LaminarTree):
        self.elem_node = tree.elem_node
        self.parent = tree.parent
        self.capacity = tree.capacity
        self.count = [0] * tree.num_nodes

    def can_add(self, e):
        v = self.elem_node[e]
        parent, count, capacity = self.parent, self.count, self.capacity
        while v >= 0:
            if count[v] >= capacity[v]:
                return False
            v = parent[v]
        return True

    def add(self, e):
        v = self.elem_node[e]
        parent, count = self.parent, self.count
        while v >= 0:
            count[v] += 1
            v = parent[v]

    def try_add(self, e):
        if self.can_add(e):
            self.add(e)
            return True
        return False


class LaminarMatroid(Matroid):
    """Independent iff ``|S ∩ L| <= b_L`` for every set ``L`` of the tree."""

    kind = "laminar"

    def __init__(self, tree: LaminarTree):
        self.tree = tree
        self.n = tree.n

    def builder(self):
        return _LaminarBuilder(self.tree)

    def span_tracker(self):
        return _LaminarSpanTracker(self.tree)

    def to_dict(self):
        t = self.tree
        return {
            "type": "laminar",
            "sets": [{"members": sorted(t.members(v)), "capacity": t.capacity[v]} for v in range(t.num_nodes)],
        }

    def __repr__(self):
        return f"LaminarMatroid({self.tree!r})"


class _LaminarSpanTracker:
    """For an independent set, ``f`` is spanned iff some set containing ``f`` is full.

    A full set spans its whole position interval, which is swept with a
    next-unspanned pointer so every element is reported exactly once.
    """

    def __init__(self, tree: LaminarTree):
        self.tree = tree
        self.basis: list[int] = []
        self.count = [0] * tree.num_nodes
        self._next = list(range(tree.n + 1))

    def _find(self, p):
        nxt = self._next
        while nxt[p] != p:
            nxt[p] = nxt[nxt[p]]
            p = nxt[p]
        return p

    def is_spanned(self, e):
        p = self.tree.position[e]
        return self._find(p) != p

    def add(self, e):
        t = self.tree
        p = t.position[e]
        if self._find(p) != p:
            return []
        self.basis.append(e)
        self._next[p] = p + 1
        newly = [e]
        v = t.elem_node[e]
        count, capacity, parent, order = self.count, t.capacity, t.parent, t.order
        while v >= 0:
            count[v] += 1
            if count[v] == capacity[v]:
                q = self._find(t.lo[v])
                hi = t.hi[v]
                while q < hi:
                    newly.append(order[q])
                    self._next[q] = q + 1
                    q = self._find(q + 1)
            v = parent[v]
        return newly
