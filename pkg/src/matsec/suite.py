"""Small reference instances shared by the ``check`` command and the test suite."""

from __future__ import annotations

from .harness import generate_instance
from .instance import Instance, make_laminar, validate_instance


def _inst(name, weights, matroid) -> Instance:
    return validate_instance({"name": name, "n": len(weights), "weights": list(weights), "matroid": matroid})


def hand_built() -> list[Instance]:
    return [
        _inst("u1-2", [2, 1], {"type": "uniform", "rank": 1}),
        _inst("free-5", [5, 1, 4, 2, 3], {"type": "uniform", "rank": 5}),
        _inst("u2-6-ties", [3, 3, 2, 2, 1, 1], {"type": "uniform", "rank": 2}),
        _inst("triangle", [3, 2, 1], {"type": "graphic", "edges": [[0, 1], [1, 2], [0, 2]]}),
        _inst("k4", [6, 1, 5, 2, 4, 3],
              {"type": "graphic", "edges": [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]]}),
        _inst("parallel-path", [9, 8, 7, 3, 2, 1, 6],
              {"type": "graphic", "edges": [[0, 1], [0, 1], [1, 2], [1, 2], [2, 3], [2, 3], [0, 3]]}),
        _inst("partition-6", [4, 9, 2, 7, 7, 1],
              {"type": "partition", "parts": [{"members": [0, 1, 2], "capacity": 1},
                                              {"members": [3, 4], "capacity": 1}]}),
        make_laminar([10, 8, 6, 4], [({0, 1}, 1), ({0, 1, 2, 3}, 2)], "lam4"),
        make_laminar(
            [10, 9, 8, 7, 6, 5, 4, 3],
            [({0, 1}, 1), ({0, 1, 2, 3}, 2), ({5, 6, 7}, 1), ({4, 5, 6, 7}, 2)],
            "lam-nested8",
        ),
        make_laminar([1, 2, 3, 4, 5, 6], [({0}, 1), ({0, 1}, 1), ({0, 1, 2}, 2), ({0, 1, 2, 3}, 2)], "lam-chain6"),
        make_laminar([5, 3, 8, 1, 9, 2], [(range(6), 2)], "lam-flat6"),
        make_laminar(
            [100, 50, 25, 12, 1, 2, 3, 4, 5, 6],
            [({0, 1, 2, 3}, 1), ({4, 5}, 1), ({6, 7, 8}, 2), (range(10), 4)],
            "lam-heavy10",
        ),
    ]


def generated() -> list[Instance]:
    specs = [
        ("uniform", {"n": 8, "k": 3}, 1),
        ("uniform", {"n": 12, "k": 4}, 2),
        ("partition", {"n": 9, "parts": 3, "capacity": 2}, 3),
        ("partition", {"n": 12, "parts": 4, "capacity": 2}, 4),
        ("graphic-random", {"n": 8, "vertices": 5}, 5),
        ("graphic-random", {"n": 10, "vertices": 6}, 6),
        ("graphic-random", {"n": 12, "vertices": 6}, 7),
        ("laminar-random", {"n": 8, "depth": 3}, 8),
        ("laminar-random", {"n": 10, "depth": 3}, 9),
        ("laminar-random", {"n": 10, "depth": 2, "branching": 4}, 10),
        ("laminar-random", {"n": 12, "depth": 3}, 11),
        ("laminar-clustered", {"n": 8, "cluster": 4, "b": 1}, 12),
        ("laminar-clustered", {"n": 10, "cluster": 4, "b": 2}, 13),
    ]
    return [generate_instance(kind, params, seed) for kind, params, seed in specs]


def reference_suite() -> list[Instance]:
    """Mixed suite: uniform, partition, graphic and laminar instances with n <= 12."""
    return hand_built() + generated()


def laminar_suite(max_n: int = 12) -> list[Instance]:
    return [inst for inst in reference_suite() if inst.is_laminar and inst.n <= max_n]


def monte_carlo_references() -> list[Instance]:
    """The three laminar instances on which sampled and exact quantities are compared."""
    by_name = {inst.name: inst for inst in reference_suite()}
    return [by_name["lam4"], by_name["lam-nested8"], by_name["laminar-clustered-n8-s12"]]
