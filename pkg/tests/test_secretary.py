import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matsec.exact import secretary_selection_dist
from matsec.secretary import ThresholdRule, run_threshold_rule, success_probability, threshold_index

# exact value from a record-process recursion in rational arithmetic
SUCCESS_3_OF_10 = 3349 / 8400


@pytest.mark.parametrize("m, r", [(1, 0), (2, 0), (3, 1), (10, 3), (100, 36)])
def test_threshold_index(m, r):
    assert threshold_index(m) == r


def test_threshold_index_rejects_empty_part():
    with pytest.raises(ValueError):
        threshold_index(0)


def keyed(values):
    return [(v, v) for v in values]


def test_rule_examples():
    assert run_threshold_rule(keyed([5])) == 5
    assert run_threshold_rule(keyed([9, 3, 7])) is None
    assert run_threshold_rule(keyed([3, 9, 7])) == 9
    assert run_threshold_rule([]) is None


def test_rule_refuses_extra_arrivals():
    rule = ThresholdRule(1)
    rule.offer(0, 1)
    with pytest.raises(RuntimeError):
        rule.offer(1, 2)


def test_rule_selects_at_most_once():
    rule = ThresholdRule(4, r=1)
    picks = [rule.offer(e, k) for e, k in enumerate([1, 2, 3, 4])]
    assert picks == [False, True, False, False]
    assert rule.selected == 1


def test_success_probability_examples():
    assert success_probability(0, 1) == 1.0
    assert success_probability(1, 3) == pytest.approx(0.5, abs=1e-15)
    assert success_probability(3, 10) == pytest.approx(SUCCESS_3_OF_10, abs=1e-15)
    with pytest.raises(ValueError):
        success_probability(3, 3)


def test_success_probability_by_enumeration():
    for n in range(1, 8):
        for r in range(n):
            wins = sum(run_threshold_rule(keyed(p), r) == n - 1 for p in itertools.permutations(range(n)))
            assert success_probability(r, n) == pytest.approx(wins / math.factorial(n), abs=1e-12)


def test_dynkin_rule_reaches_one_over_e():
    worst = min(success_probability(threshold_index(n), n) for n in range(1, 10_001))
    assert worst >= 1 / math.e


@pytest.mark.parametrize("m", range(1, 9))
def test_enumeration_matches_formula(m):
    keys = list(range(m))
    enum = secretary_selection_dist(keys, mode="enumerate")
    formula = secretary_selection_dist(keys, mode="formula")
    assert set(enum) == set(formula) == set(range(m))
    for e in keys:
        assert enum[e] == pytest.approx(formula[e], abs=1e-12)
    assert enum[m - 1] == pytest.approx(success_probability(threshold_index(m), m), abs=1e-12)


def test_selection_distribution_examples():
    assert secretary_selection_dist([4.0]) == {0: 1.0}
    assert secretary_selection_dist([1.0, 2.0], r=0) == {0: 0.5, 1: 0.5}
    assert secretary_selection_dist([1.0, 3.0, 2.0], r=1)[1] == pytest.approx(0.5)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 1000), min_size=1, max_size=30, unique=True))
def test_rule_picks_first_record_after_sample(values):
    r = threshold_index(len(values))
    got = run_threshold_rule(keyed(values))
    best_sample = max(values[:r], default=-1)
    later = [v for v in values[r:] if v > best_sample]
    assert got == (later[0] if later else None)
