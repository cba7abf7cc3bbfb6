"""Instances (weights plus a matroid), validation of raw descriptions, greedy optimum."""

from __future__ import annotations

import json
import math
from collections.abc import Iterable
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

from .errors import DanglingElement, NegativeWeight, ValidationError
from .matroids import GraphicMatroid, LaminarMatroid, Matroid, PartitionMatroid, UniformMatroid
from .tree import LaminarTree


@dataclass(frozen=True, eq=False)
class Instance:
    """Weighted ground set ``range(n)`` with a matroid constraint.

    Elements are ranked by the key ``(weight, -id)``: heavier first, ties to
    the smaller id. ``order`` lists elements best first and ``rank_of[e]`` is
    the 0-based position of ``e`` in it, so ``a`` beats ``b`` exactly when
    ``rank_of[a] < rank_of[b]``.
    """

    weights: tuple[float, ...]
    matroid: Matroid
    name: str = ""
    # ids in the raw description, for instances that lost zero-capacity sets
    original_ids: tuple[int, ...] | None = None

    def __post_init__(self):
        if len(self.weights) != self.matroid.n:
            raise ValidationError(
                f"{len(self.weights)} weights for a matroid on {self.matroid.n} elements"
            )

    @property
    def n(self) -> int:
        return len(self.weights)

    @cached_property
    def order(self) -> tuple[int, ...]:
        w = self.weights
        return tuple(sorted(range(self.n), key=lambda e: (-w[e], e)))

    @cached_property
    def rank_of(self) -> tuple[int, ...]:
        pos = [0] * self.n
        for i, e in enumerate(self.order):
            pos[e] = i
        return tuple(pos)

    def key(self, e: int) -> tuple[float, int]:
        return (self.weights[e], -e)

    def weight(self, S: Iterable[int]) -> float:
        return math.fsum(self.weights[e] for e in S)

    @cached_property
    def opt(self) -> tuple[int, ...]:
        return greedy_max_weight(self)

    @cached_property
    def opt_weight(self) -> float:
        return self.weight(self.opt)

    @property
    def is_laminar(self) -> bool:
        return isinstance(self.matroid, LaminarMatroid)

    def to_dict(self) -> dict:
        out = {"n": self.n, "weights": list(self.weights), "matroid": self.matroid.to_dict()}
        if self.name:
            out["name"] = self.name
        return out

    def __repr__(self):
        label = f"{self.name!r}, " if self.name else ""
        return f"Instance({label}n={self.n}, {self.matroid!r})"


def greedy_max_weight(instance: Instance, restrict: Iterable[int] | None = None) -> tuple[int, ...]:
    """Maximum-weight independent subset of ``restrict`` (default: everything).

    Scans candidates best first and keeps each one that stays independent;
    the result is listed best first.
    """
    if restrict is None:
        candidates: Iterable[int] = instance.order
    else:
        candidates = sorted(set(restrict), key=instance.rank_of.__getitem__)
    b = instance.matroid.builder()
    chosen = []
    for e in candidates:
        if b.can_add(e):
            b.add(e)
            chosen.append(e)
    return tuple(chosen)


def _int_list(values, what) -> list[int]:
    try:
        return [int(v) for v in values]
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{what} must be a list of integers") from exc


def _flatten_laminar(node, out, where="sets"):
    """Collect ``(members, capacity)`` for a node given by members and/or children."""
    if not isinstance(node, dict) or "capacity" not in node:
        raise ValidationError(f"laminar node in {where} needs a 'capacity'")
    members = set(_int_list(node.get("members", []), "members"))
    for i, child in enumerate(node.get("children", [])):
        members |= _flatten_laminar(child, out, f"{where}.children[{i}]")
    cap = node["capacity"]
    if not isinstance(cap, int) or isinstance(cap, bool) or cap < 0:
        raise ValidationError(f"laminar capacity must be a non-negative integer, got {cap!r}")
    out.append((frozenset(members), cap))
    return members


def _laminar_sets(desc) -> list[tuple[frozenset, int]]:
    nodes = desc.get("sets")
    if nodes is None and "tree" in desc:
        nodes = [desc["tree"]]
    if nodes is None:
        raise ValidationError("laminar matroid needs 'sets' or 'tree'")
    out: list[tuple[frozenset, int]] = []
    for i, node in enumerate(nodes):
        _flatten_laminar(node, out, f"sets[{i}]")
    return out


def validate_instance(raw: dict) -> Instance:
    """Turn a parsed instance description into a checked :class:`Instance`.

    Laminar families are checked for crossing sets, the elements of every
    zero-capacity set are deleted (remaining ids are renumbered and the old
    ids kept in ``original_ids``) and the ground set is added as a root set
    with capacity ``n`` when missing.
    """
    if not isinstance(raw, dict):
        raise ValidationError("instance description must be a JSON object")
    try:
        n = int(raw["n"])
        weights = [float(w) for w in raw["weights"]]
        desc = raw["matroid"]
    except KeyError as exc:
        raise ValidationError(f"instance is missing field {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        raise ValidationError("'n' must be an integer and 'weights' a list of numbers") from exc
    if n < 0:
        raise ValidationError("n must be non-negative")
    if len(weights) != n:
        raise DanglingElement(f"expected {n} weights, got {len(weights)}")
    for e, w in enumerate(weights):
        if not math.isfinite(w):
            raise ValidationError(f"weight of element {e} is not finite")
        if w < 0:
            raise NegativeWeight(f"weight of element {e} is negative ({w})")
    name = str(raw.get("name", ""))
    kind = desc.get("type") if isinstance(desc, dict) else None

    if kind == "uniform":
        k = desc.get("rank", desc.get("k"))
        if k is None:
            raise ValidationError("uniform matroid needs 'rank'")
        return Instance(tuple(weights), UniformMatroid(n, int(k)), name)

    if kind == "partition":
        parts = desc.get("parts", [])
        members = [_int_list(p.get("members", []), "members") for p in parts]
        caps = [int(p.get("capacity", 1)) for p in parts]
        return Instance(tuple(weights), PartitionMatroid(n, members, caps), name)

    if kind == "graphic":
        edges = desc.get("edges", [])
        if len(edges) != n:
            raise DanglingElement(f"graphic matroid has {len(edges)} edges but n = {n}")
        pairs = []
        for e in edges:
            if len(e) != 2:
                raise ValidationError(f"edge {e!r} must have two endpoints")
            pairs.append(tuple(_int_list(e, "edge")))
        return Instance(tuple(weights), GraphicMatroid(pairs, desc.get("vertices")), name)

    if kind == "laminar":
        sets = _laminar_sets(desc)
        # laminarity is judged on the family as given, before any deletion
        LaminarTree.from_sets(n, [(m, max(c, 1)) for m, c in sets])
        removed = set().union(*(m for m, c in sets if c == 0))
        if not removed:
            return Instance(tuple(weights), LaminarMatroid(LaminarTree.from_sets(n, sets)), name)
        keep = [e for e in range(n) if e not in removed]
        new_id = {old: new for new, old in enumerate(keep)}
        kept_sets = [
            (frozenset(new_id[x] for x in m if x in new_id), c) for m, c in sets if c > 0
        ]
        tree = LaminarTree.from_sets(len(keep), kept_sets)
        return Instance(tuple(weights[e] for e in keep), LaminarMatroid(tree), name, tuple(keep))

    raise ValidationError(f"unknown matroid type {kind!r}")


def load_instance(path: str | Path) -> Instance:
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: not valid JSON ({exc})") from exc
    inst = validate_instance(raw)
    if not inst.name:
        inst = Instance(inst.weights, inst.matroid, Path(path).stem, inst.original_ids)
    return inst


def save_instance(instance: Instance, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(instance.to_dict(), fh, indent=2)
        fh.write("\n")


def make_laminar(weights, sets, name="") -> Instance:
    """Shorthand for tests and generators: laminar instance from ``(members, capacity)`` pairs."""
    return validate_instance(
        {
            "name": name,
            "n": len(weights),
            "weights": list(weights),
            "matroid": {"type": "laminar", "sets": [{"members": sorted(m), "capacity": c} for m, c in sets]},
        }
    )
