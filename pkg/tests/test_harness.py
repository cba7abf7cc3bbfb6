import csv
import io
import json
import math

import pytest

from matsec import harness
from matsec.errors import InvariantViolation, ValidationError
from matsec.exact import exact_free_order, exact_laminar
from matsec.harness import (
    FREQUENCY_COLUMNS,
    SUMMARY_COLUMNS,
    ExperimentConfig,
    RunStats,
    emit_report,
    frequencies_csv,
    generate_instance,
    load_run_stats,
    run_trials,
    summary_csv,
)
from matsec.instance import save_instance, validate_instance
from matsec.matroids import LaminarMatroid

U12 = validate_instance({"name": "u1-2", "n": 2, "weights": [2, 1], "matroid": {"type": "uniform", "rank": 1}})


def test_uniform_generator():
    inst = generate_instance("uniform", {"n": 10, "k": 3}, 5)
    assert inst.n == 10 and len(set(inst.weights)) == 10
    assert inst.matroid.rank(range(10)) == 3


def test_laminar_generator_capacities():
    inst = generate_instance("laminar-random", {"n": 12, "depth": 3}, 7)
    assert isinstance(inst.matroid, LaminarMatroid)
    assert all(c >= 1 for _, c in inst.matroid.tree.sets())


def test_clustered_generator_puts_heaviest_in_one_set():
    inst = generate_instance("laminar-clustered", {"n": 12, "cluster": 4, "b": 1}, 3)
    top4 = set(inst.order[:4])
    assert any(m == top4 and c == 1 for m, c in inst.matroid.tree.sets())


def test_generators_are_deterministic():
    for kind in harness.GENERATORS:
        a, b = generate_instance(kind, {"n": 9}, 11), generate_instance(kind, {"n": 9}, 11)
        assert a.to_dict() == b.to_dict()


@pytest.mark.parametrize("kind, params", [("uniform", {"n": 0}), ("partition", {"parts": 0}),
                                          ("graphic-random", {"vertices": 1}), ("laminar-random", {"branching": 1}),
                                          ("laminar-clustered", {"n": 3, "cluster": 5}), ("matching", {})])
def test_generator_rejects_bad_params(kind, params):
    with pytest.raises(ValidationError):
        generate_instance(kind, params)


@pytest.mark.parametrize("kwargs", [
    {"algorithm": "greedy"},
    {"trials": 0},
    {"q": 0.5},
    {"algorithm": "laminar-improved", "q": 1.0},
    {"phase2_order": "reversed"},
    {"algorithm": "laminar-simple", "phase2_order": "schedule"},
    {"format": "xml"},
])
def test_config_validation(kwargs):
    with pytest.raises(ValidationError):
        ExperimentConfig(instance=U12, **kwargs)


def test_laminar_algorithm_needs_laminar_instance():
    with pytest.raises(ValidationError):
        ExperimentConfig(instance=U12, algorithm="laminar-simple").resolve_instance()
    with pytest.raises(ValidationError):
        run_trials(ExperimentConfig(instance=U12, algorithm="laminar-improved", trials=3), U12)


def test_instance_sources(tmp_path):
    path = tmp_path / "u.json"
    save_instance(U12, path)
    assert ExperimentConfig(instance=str(path)).resolve_instance().weights == U12.weights
    desc = {"kind": "uniform", "params": {"n": 5}, "seed": 2}
    assert ExperimentConfig(instance=desc).resolve_instance().name == "uniform-n5-s2"


def test_free_order_mean_on_two_elements():
    stats = run_trials(ExperimentConfig(instance=U12, trials=100_000, seed=3))
    exact = exact_free_order(U12).expected_weight
    se = stats.std_weight / math.sqrt(stats.trials)
    assert abs(stats.mean_weight - exact) <= 3 * se
    assert stats.ci_lo < stats.mean_weight < stats.ci_hi


def test_laminar_improved_mean_matches_exact(lam4):
    stats = run_trials(ExperimentConfig(instance=lam4, algorithm="laminar-improved", trials=20_000, seed=1))
    exact = exact_laminar(lam4, "improved").expected_weight
    assert abs(stats.mean_weight - exact) <= 3 * stats.std_weight / math.sqrt(stats.trials)
    assert len(stats.diagnostics["z_mean"]) == len(stats.opt)


def test_repeated_runs_are_byte_identical(lam4, tmp_path):
    texts = []
    for i in range(2):
        out = tmp_path / f"run{i}.csv"
        stats = run_trials(ExperimentConfig(instance=lam4, algorithm="laminar-simple", trials=1, seed=9))
        texts.append(emit_report(stats, "csv", out))
        texts.append(out.with_name(f"run{i}.frequencies.csv").read_text())
    assert texts[0] == texts[2] and texts[1] == texts[3]


def test_workers_do_not_change_results(lam4):
    one = run_trials(ExperimentConfig(instance=lam4, trials=400, seed=5, workers=1))
    two = run_trials(ExperimentConfig(instance=lam4, trials=400, seed=5, workers=2))
    assert summary_csv([one]) == summary_csv([two])
    assert one.frequencies == two.frequencies


def test_summary_row_ratio(lam4):
    stats = run_trials(ExperimentConfig(instance=lam4, trials=200, seed=1))
    rows = list(csv.reader(io.StringIO(summary_csv([stats]))))
    assert rows[0] == SUMMARY_COLUMNS and len(rows) == 2
    row = dict(zip(rows[0], rows[1]))
    assert float(row["ratio"]) == pytest.approx(float(row["opt_w"]) / float(row["mean_w"]))


def test_empty_frequency_map_gives_header_only():
    empty = validate_instance({"n": 0, "weights": [], "matroid": {"type": "uniform", "rank": 0}})
    stats = run_trials(ExperimentConfig(instance=empty, trials=3))
    assert frequencies_csv([stats]) == ",".join(FREQUENCY_COLUMNS) + "\n"


def test_json_round_trip(lam4, tmp_path):
    stats = run_trials(ExperimentConfig(instance=lam4, algorithm="laminar-improved", trials=50, seed=2))
    path = tmp_path / "stats.json"
    emit_report(stats, "json", path)
    assert load_run_stats(path) == [stats]
    zero = RunStats("x", "free-order", 1, 0, 0.0, 0.0, 0.0, 0.0, 1.0, math.inf, [])
    assert json.loads(json.dumps(zero.to_dict()))["ratio"] is None
    assert RunStats.from_dict(zero.to_dict()) == zero


def test_adversarial_orders_stay_feasible(lam4):
    for order in ("adversarial-id", "reversed", "opt-last"):
        for algorithm in ("laminar-simple", "laminar-improved"):
            stats = run_trials(ExperimentConfig(instance=lam4, algorithm=algorithm, trials=200, phase2_order=order))
            assert stats.phase2_order == order and stats.mean_weight <= lam4.opt_weight
    stats = run_trials(ExperimentConfig(instance=lam4, trials=200, phase2_order="random"))
    assert stats.mean_weight <= lam4.opt_weight


def test_dependent_output_raises(lam4, monkeypatch):
    class Broken:
        output = frozenset({0, 1})

    monkeypatch.setattr(harness, "simulate_free_order", lambda *a, **k: Broken())
    with pytest.raises(InvariantViolation):
        run_trials(ExperimentConfig(instance=lam4, trials=1))


def test_exact_report_in_csv(lam4):
    text = summary_csv([exact_laminar(lam4, "simple")])
    assert text.splitlines()[1].startswith("lam4,laminar-simple,16,")
    with pytest.raises(ValidationError):
        emit_report(exact_laminar(lam4), "yaml")
