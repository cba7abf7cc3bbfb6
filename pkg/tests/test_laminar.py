import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matsec.errors import ValidationError
from matsec.harness import generate_instance
from matsec.instance import greedy_max_weight, make_laminar, validate_instance
from matsec.laminar import (
    PHASE2_ORDERS,
    EmptySampleOptimum,
    consecutive_order,
    improved_scheme,
    interval_partition,
    odd_even_parts,
    run_improved_laminar,
    run_simple_laminar,
    simple_scheme,
    simulate_improved_laminar,
    simulate_simple_laminar,
)
from matsec.tree import LaminarTree

FLAT6 = make_laminar([6, 5, 4, 3, 2, 1], [(range(6), 2)])


def laminar_instances():
    return st.builds(
        lambda n, depth, seed: generate_instance("laminar-random", {"n": n, "depth": depth}, seed),
        st.integers(1, 12), st.integers(0, 3), st.integers(0, 10**6),
    )


def test_flat_family_keeps_identity_order():
    order = consecutive_order(LaminarTree.from_sets(5, []))
    assert order.element == tuple(range(5)) == order.position


def test_nested_family_is_contiguous():
    tree = LaminarTree.from_sets(7, [({1, 4}, 1), ({1, 4, 6}, 2), ({0, 3}, 1)])
    order = consecutive_order(tree)
    for members, _ in tree.sets():
        pos = sorted(order.position[e] for e in members)
        assert pos[-1] - pos[0] + 1 == len(pos)


def test_odd_even_examples():
    odd, even = odd_even_parts(6, {1, 4}, {1, 4})
    assert odd == [{0}, {5}] and even == [{2, 3}]
    odd, even = odd_even_parts(3, {0}, {0})
    assert odd == [] and even == [{1, 2}]
    with pytest.raises(EmptySampleOptimum):
        odd_even_parts(3, set(), set())


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 12), st.data())
def test_odd_even_parts_avoid_interior_cuts(n, data):
    A = data.draw(st.sets(st.integers(0, n - 1), min_size=1))
    cuts = data.draw(st.sets(st.sampled_from(sorted(A)), min_size=1))
    odd, even = odd_even_parts(n, A, cuts)
    parts = odd + even
    assert sorted(p for part in parts for p in part) == sorted(set(range(n)) - A)
    for part in parts:
        assert not any(min(part) < c < max(part) for c in cuts)
    # within a family no two parts share a gap between consecutive cuts
    for family in (odd, even):
        assert all(max(a) < min(b) or max(b) < min(a) for a, b in itertools.combinations(family, 2))


def test_interval_partition_examples():
    scheme = interval_partition({1, 4}, FLAT6.matroid.tree)
    assert dict(zip(scheme.anchors, scheme.parts)) == {1: {0, 1, 2, 3}, 4: {4, 5}}
    tree = LaminarTree.from_sets(4, [({0, 1}, 1)])
    scheme = interval_partition({2}, tree)
    assert scheme.parts == (frozenset(range(4)),) and scheme.anchors == (2,)
    with pytest.raises(ValueError):
        interval_partition({0, 1}, tree)
    assert interval_partition(set(), tree).kind == "whole"


@settings(max_examples=80, deadline=None)
@given(laminar_instances(), st.data())
def test_interval_parts_are_blocks_around_their_anchor(inst, data):
    tree = inst.matroid.tree
    A = data.draw(st.sets(st.integers(0, inst.n - 1)))
    I = greedy_max_weight(inst, A)
    scheme = interval_partition(I, tree)
    assert sorted(e for part in scheme.parts for e in part) == list(range(inst.n))
    if not I:
        return
    assert sorted(scheme.anchors) == sorted(I)
    for part, anchor in zip(scheme.parts, scheme.anchors):
        pos = sorted(tree.position[e] for e in part)
        assert pos == list(range(pos[0], pos[-1] + 1))
        assert anchor in part


@settings(max_examples=60, deadline=None)
@given(laminar_instances(), st.data())
def test_transversals_are_independent(inst, data):
    A = frozenset(data.draw(st.sets(st.integers(0, inst.n - 1))))
    opt_a = greedy_max_weight(inst, A)
    schemes = [improved_scheme(inst, A, opt_a), interval_partition(opt_a, inst.matroid.tree)]
    if opt_a:
        schemes += [simple_scheme(inst, A, opt_a, True), simple_scheme(inst, A, opt_a, False)]
    for scheme in schemes:
        parts = [sorted(p) for p in scheme.parts]
        if scheme.kind == "whole":
            continue
        for pick in itertools.islice(itertools.product(*parts), 500):
            assert inst.matroid.is_independent(pick)


def test_forced_sample_examples(lam4):
    assert run_simple_laminar(lam4, sample=range(4), coin=True) == frozenset()
    assert run_improved_laminar(lam4, sample=range(4)) == frozenset()
    run = simulate_simple_laminar(lam4, sample=(), arrival=[3, 2, 1, 0])
    assert run.scheme.kind == "whole" and run.scheme.parts == (frozenset(range(4)),)
    # sample size floor(4/e) = 1 watches element 3, then 2 beats it
    assert run.output == {2}
    run = simulate_improved_laminar(lam4, sample=())
    assert run.scheme.parts == (frozenset(range(4)),)
    run = simulate_improved_laminar(FLAT6, sample={1, 4})
    assert run.opt_sample == (1, 4)
    assert set(run.scheme.parts) == {frozenset({0, 2, 3}), frozenset({5})}


def test_coin_chooses_family():
    odd = simulate_simple_laminar(FLAT6, sample={1, 4}, coin=True)
    even = simulate_simple_laminar(FLAT6, sample={1, 4}, coin=False)
    assert set(odd.scheme.parts) == {frozenset({0}), frozenset({5})}
    assert set(even.scheme.parts) == {frozenset({2, 3})}


@settings(max_examples=60, deadline=None)
@given(laminar_instances(), st.integers(0, 10**6), st.sampled_from(PHASE2_ORDERS))
def test_outputs_are_independent_in_every_order(inst, seed, order):
    rng = np.random.default_rng(seed)
    for run in (simulate_simple_laminar(inst, rng, phase2_order=order),
                simulate_improved_laminar(inst, rng, phase2_order=order)):
        assert inst.matroid.is_independent(run.output)
        assert not run.output & run.sample
        assert all(sum(e in part for e in run.output) <= 1 for part in run.scheme.parts)


def test_phase_two_orders(lam4):
    # phase-2 arrivals for A = {1}: a lightest-first stream lets the rule stop early
    run = simulate_improved_laminar(lam4, sample={1}, phase2_order="reversed")
    assert lam4.matroid.is_independent(run.output)
    with pytest.raises(ValueError):
        simulate_improved_laminar(lam4, np.random.default_rng(0), phase2_order="sideways")


def test_rejects_bad_input(lam4):
    uniform = validate_instance({"n": 2, "weights": [1, 2], "matroid": {"type": "uniform", "rank": 1}})
    with pytest.raises(ValidationError):
        run_simple_laminar(uniform, np.random.default_rng(0))
    with pytest.raises(ValueError):
        run_improved_laminar(lam4, np.random.default_rng(0), q=1.5)
    with pytest.raises(ValueError):
        simulate_simple_laminar(lam4, sample={0}, arrival=[1, 2])
    with pytest.raises(ValueError):
        run_improved_laminar(lam4)
