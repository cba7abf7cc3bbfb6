"""Shared fixtures and definition-level reference oracles for the tests."""

import itertools

import numpy as np
import pytest
from hypothesis import strategies as st

from matsec.harness import generate_instance
from matsec.matroids import GraphicMatroid, LaminarMatroid, PartitionMatroid, UniformMatroid
from matsec.suite import hand_built


def independent_by_definition(matroid, S):
    """Independence straight from each matroid's defining constraint."""
    S = set(S)
    if isinstance(matroid, UniformMatroid):
        return len(S) <= matroid.k
    if isinstance(matroid, PartitionMatroid):
        return all(len(S & set(p)) <= c for p, c in zip(matroid.parts, matroid.capacities))
    if isinstance(matroid, LaminarMatroid):
        return all(len(S & m) <= c for m, c in matroid.tree.sets())
    if isinstance(matroid, GraphicMatroid):
        # a forest has |V(S)| - components(S) == |S|
        adj = {}
        for e in S:
            a, b = matroid.edges[e]
            if a == b:
                return False
            adj.setdefault(a, set()).add(b)
            adj.setdefault(b, set()).add(a)
        seen, comps = set(), 0
        for v in adj:
            if v in seen:
                continue
            comps += 1
            stack = [v]
            while stack:
                u = stack.pop()
                if u not in seen:
                    seen.add(u)
                    stack.extend(adj[u] - seen)
        return len(adj) - comps == len(S)
    raise TypeError(matroid)


def rank_by_definition(matroid, S):
    S = sorted(S)
    for size in range(len(S), -1, -1):
        if any(independent_by_definition(matroid, T) for T in itertools.combinations(S, size)):
            return size
    return 0


def subsets(n):
    return (frozenset(i for i in range(n) if mask >> i & 1) for mask in range(1 << n))


def random_matroid(kind, n, seed):
    """Random matroid of each of the four kinds on ``n`` elements."""
    rng = np.random.default_rng(seed)
    if kind == "uniform":
        return UniformMatroid(n, int(rng.integers(1, n + 1)))
    if kind == "partition":
        return generate_instance("partition", {"n": n, "parts": int(rng.integers(1, 4)), "capacity": 3}, seed).matroid
    if kind == "graphic":
        return generate_instance("graphic-random", {"n": n, "vertices": int(rng.integers(2, 7))}, seed).matroid
    if kind == "laminar":
        return generate_instance("laminar-random", {"n": n, "depth": int(rng.integers(0, 4))}, seed).matroid
    raise ValueError(kind)


MATROID_KINDS = ("uniform", "partition", "graphic", "laminar")


@st.composite
def matroids(draw, max_n=8):
    kind = draw(st.sampled_from(MATROID_KINDS))
    n = draw(st.integers(1, max_n))
    seed = draw(st.integers(0, 10_000))
    return random_matroid(kind, n, seed)


@pytest.fixture
def lam4():
    return next(i for i in hand_built() if i.name == "lam4")


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
