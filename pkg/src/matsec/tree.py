"""Laminar families stored as rooted trees with a consecutive element layout.

Every node is one set of the family. The root is the whole ground set. Each
element hangs off the deepest set that contains it, and a depth-first layout
assigns positions so that every set occupies a contiguous interval
``[lo[node], hi[node])`` of positions.
"""

from __future__ import annotations

from collections.abc import Iterable

from .errors import CrossingSets, DanglingElement, ValidationError


class LaminarTree:
    """Validated laminar family with per-set capacities.

    Build through :meth:`from_sets`; the constructor does no checking.
    """

    def __init__(self, n, capacity, parent, node_members_size, elem_node):
        self.n = n
        self.capacity = capacity
        self.parent = parent
        self.elem_node = elem_node
        self.children = [[] for _ in capacity]
        for node, p in enumerate(parent):
            if p >= 0:
                self.children[p].append(node)
        self.depth = [0] * len(capacity)
        for node in range(1, len(capacity)):
            # parents are always created before children
            self.depth[node] = self.depth[parent[node]] + 1
        self._sizes = node_members_size
        self._layout()

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[tuple[Iterable[int], int]]) -> LaminarTree:
        """Build a tree from ``(members, capacity)`` pairs.

        Identical sets are merged keeping the smaller capacity, empty sets are
        dropped and the ground set is added as root with capacity ``n`` when no
        given set covers it.
        """
        merged: dict[frozenset, int] = {}
        for members, cap in sets:
            members = frozenset(members)
            if not members:
                continue
            for x in members:
                if not 0 <= x < n:
                    raise DanglingElement(f"laminar set references element {x} outside [0, {n})")
            if cap < 1:
                raise ValidationError(f"capacity {cap} < 1 for laminar set {sorted(members)}")
            merged[members] = min(cap, merged.get(members, cap))

        ground = frozenset(range(n))
        if ground not in merged:
            merged[ground] = max(n, 1)
        ranked = sorted(merged.items(), key=lambda kv: (-len(kv[0]), min(kv[0], default=-1)))

        owner = [-1] * n
        capacity: list[int] = []
        parent: list[int] = []
        sizes: list[int] = []
        node_sets: list[frozenset] = []
        for members, cap in ranked:
            elems = sorted(members)
            p = owner[elems[0]] if elems else -1
            for x in elems:
                if owner[x] != p:
                    # one of the two owners meets the new set without containing it
                    for c in (p, owner[x]):
                        if not members <= node_sets[c]:
                            raise CrossingSets(members, node_sets[c])
            node = len(capacity)
            capacity.append(cap)
            parent.append(p)
            sizes.append(len(members))
            node_sets.append(members)
            for x in elems:
                owner[x] = node
        return cls(n, capacity, parent, sizes, owner)

    def _layout(self):
        direct: list[list[int]] = [[] for _ in self.capacity]
        for e in range(self.n):
            direct[self.elem_node[e]].append(e)
        self.lo = [0] * len(self.capacity)
        self.hi = [0] * len(self.capacity)
        order: list[int] = []
        stack = [(0, False)]
        while stack:
            node, done = stack.pop()
            if done:
                self.hi[node] = len(order)
                continue
            self.lo[node] = len(order)
            order.extend(direct[node])
            stack.append((node, True))
            for child in reversed(self.children[node]):
                stack.append((child, False))
        self.order = order
        self.position = [0] * self.n
        for pos, e in enumerate(order):
            self.position[e] = pos

    @property
    def num_nodes(self) -> int:
        return len(self.capacity)

    @property
    def root(self) -> int:
        return 0

    def members(self, node: int) -> frozenset:
        return frozenset(self.order[self.lo[node]:self.hi[node]])

    def sets(self) -> list[tuple[frozenset, int]]:
        return [(self.members(v), self.capacity[v]) for v in range(self.num_nodes)]

    def chain(self, e: int) -> list[int]:
        """Nodes containing ``e``, deepest first."""
        out = []
        v = self.elem_node[e]
        while v >= 0:
            out.append(v)
            v = self.parent[v]
        return out

    def max_depth(self) -> int:
        return max(self.depth, default=0)

    def __repr__(self):
        return f"LaminarTree(n={self.n}, nodes={self.num_nodes}, depth={self.max_depth()})"
