"""Instance generators, the Monte Carlo trial runner and report writers.

Seeds: trial ``t`` of a run with master seed ``s`` draws from
``numpy.random.default_rng([s, t])``, i.e. a ``SeedSequence`` built from the
pair. Trials therefore never share a stream, and any trial can be replayed
on its own or on any worker.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvariantViolation, ValidationError
from .exact import ExactReport
from .free_order import simulate_free_order
from .instance import Instance, load_instance, make_laminar, validate_instance
from .laminar import (
    IMPROVED_SAMPLE_PROB,
    PHASE2_ORDERS,
    simulate_improved_laminar,
    simulate_simple_laminar,
)
from .matroids import LaminarMatroid

ALGORITHMS = ("free-order", "laminar-simple", "laminar-improved")
GENERATORS = ("uniform", "partition", "graphic-random", "laminar-random", "laminar-clustered")
SUMMARY_COLUMNS = ["instance", "algorithm", "trials", "seed", "mean_w", "ci_lo", "ci_hi", "opt_w", "ratio"]
FREQUENCY_COLUMNS = ["instance", "algorithm", "element", "frequency"]
Z95 = 1.959963984540054


def _distinct_weights(rng, n):
    return [float(w) for w in rng.choice(100 * max(n, 1), size=n, replace=False) + 1]


def _random_laminar_sets(rng, elems, depth, branching, out):
    """Recursively cut ``elems`` into consecutive chunks and keep most chunks as sets."""
    if depth == 0 or len(elems) < 2:
        return
    k = int(rng.integers(2, branching + 1))
    cuts = sorted(rng.choice(np.arange(1, len(elems)), size=min(k - 1, len(elems) - 1), replace=False).tolist())
    for lo, hi in zip([0] + cuts, cuts + [len(elems)]):
        chunk = elems[lo:hi]
        if rng.random() < 0.8:
            out.append((frozenset(chunk), int(rng.integers(1, max(1, len(chunk) // 2) + 1))))
        _random_laminar_sets(rng, chunk, depth - 1, branching, out)


def generate_instance(kind: str, params: dict | None = None, seed: int = 0) -> Instance:
    """Random instance of the given kind; the same ``(kind, params, seed)`` gives the same instance.

    Parameters by kind (all take ``n``):
      uniform: ``k``.
      partition: ``parts``, ``capacity`` (maximum per part).
      graphic-random: ``vertices``.
      laminar-random: ``depth``, ``branching``, ``root_capacity``.
      laminar-clustered: ``cluster``, ``b``, ``root_capacity``. The ``cluster``
      heaviest elements, with geometrically decaying weights, all sit in
      one set of capacity ``b``.
    """
    params = dict(params or {})
    rng = np.random.default_rng(seed)
    n = int(params.get("n", 10))
    if n < 1:
        raise ValidationError("generated instances need n >= 1")
    name = f"{kind}-n{n}-s{seed}"

    if kind == "uniform":
        k = int(params.get("k", max(1, n // 3)))
        return validate_instance({"name": name, "n": n, "weights": _distinct_weights(rng, n),
                                  "matroid": {"type": "uniform", "rank": k}})
    if kind == "partition":
        num = int(params.get("parts", max(1, n // 3)))
        cap = int(params.get("capacity", 2))
        if num < 1 or cap < 1:
            raise ValidationError("partition generator needs parts >= 1 and capacity >= 1")
        owner = rng.integers(0, num, size=n)
        parts = [
            {"members": np.flatnonzero(owner == i).tolist(), "capacity": int(rng.integers(1, cap + 1))}
            for i in range(num)
        ]
        return validate_instance({"name": name, "n": n, "weights": _distinct_weights(rng, n),
                                  "matroid": {"type": "partition", "parts": parts}})
    if kind == "graphic-random":
        v = int(params.get("vertices", max(2, n // 2 + 1)))
        if v < 2:
            raise ValidationError("graphic generator needs at least 2 vertices")
        edges = []
        for _ in range(n):
            a, b = rng.choice(v, size=2, replace=False).tolist()
            edges.append([a, b])
        return validate_instance({"name": name, "n": n, "weights": _distinct_weights(rng, n),
                                  "matroid": {"type": "graphic", "edges": edges, "vertices": v}})
    if kind == "laminar-random":
        depth = int(params.get("depth", 3))
        branching = int(params.get("branching", 3))
        if depth < 0 or branching < 2:
            raise ValidationError("laminar generator needs depth >= 0 and branching >= 2")
        elems = rng.permutation(n).tolist()
        sets: list = []
        _random_laminar_sets(rng, elems, depth, branching, sets)
        root = int(params.get("root_capacity", rng.integers(1, n + 1)))
        sets.append((frozenset(range(n)), root))
        return make_laminar(_distinct_weights(rng, n), sets, name)
    if kind == "laminar-clustered":
        c = int(params.get("cluster", min(4, n)))
        b = int(params.get("b", 1))
        if not 1 <= c <= n or b < 1:
            raise ValidationError("clustered generator needs 1 <= cluster <= n and b >= 1")
        elems = rng.permutation(n).tolist()
        cluster, others = elems[:c], elems[c:]
        weights = [0.0] * n
        for i, e in enumerate(cluster):
            weights[e] = 1000.0 * 0.5**i
        floor_w = weights[cluster[-1]]
        for e, u in zip(others, rng.random(len(others))):
            weights[e] = float(floor_w * 0.9 * u)
        sets = [(frozenset(cluster), b)]
        if len(others) >= 2:
            _random_laminar_sets(rng, others, 2, 3, sets)
        root = int(params.get("root_capacity", max(2, n // 3)))
        sets.append((frozenset(range(n)), root))
        return make_laminar(weights, sets, name)
    raise ValidationError(f"unknown generator kind {kind!r}; expected one of {GENERATORS}")


@dataclass
class ExperimentConfig:
    instance: object  # Instance, path to an instance file, or {"kind", "params", "seed"}
    algorithm: str = "free-order"
    trials: int = 10_000
    seed: int = 0
    q: float | None = None
    phase2_order: str | None = None  # None: layered schedule (free-order) / random arrivals (laminar)
    output: str | None = None
    format: str = "csv"
    workers: int = 1

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValidationError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.trials < 1:
            raise ValidationError("trials must be >= 1")
        if self.q is not None:
            if self.algorithm != "laminar-improved":
                raise ValidationError("q only applies to laminar-improved")
            if not 0 < self.q < 1:
                raise ValidationError(f"q must lie in (0, 1), got {self.q}")
        if self.phase2_order is not None:
            allowed = ("schedule", "random") if self.algorithm == "free-order" else PHASE2_ORDERS
            if self.phase2_order not in allowed:
                raise ValidationError(f"phase-2 order for {self.algorithm} must be one of {allowed}")
        if self.format not in ("csv", "json"):
            raise ValidationError("format must be csv or json")

    def resolve_instance(self) -> Instance:
        inst = self.instance
        if isinstance(inst, Instance):
            resolved = inst
        elif isinstance(inst, dict):
            resolved = generate_instance(inst["kind"], inst.get("params"), inst.get("seed", 0))
        else:
            resolved = load_instance(inst)
        if self.algorithm != "free-order" and not isinstance(resolved.matroid, LaminarMatroid):
            raise ValidationError(f"{self.algorithm} needs a laminar instance, got {resolved.matroid.kind}")
        return resolved


@dataclass
class RunStats:
    instance: str
    algorithm: str
    trials: int
    seed: int
    mean_weight: float
    std_weight: float
    ci_lo: float
    ci_hi: float
    opt_weight: float
    ratio: float
    frequencies: list[float]
    phase2_order: str | None = None
    q: float | None = None
    wall_time: float = 0.0
    opt: list[int] = field(default_factory=list)
    # laminar runs: per optimum element (aligned with ``opt``) solitary rate and Z moments
    diagnostics: dict[str, list[float]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = asdict(self)
        if math.isinf(self.ratio):
            out["ratio"] = None
        return out

    @classmethod
    def from_dict(cls, raw: dict) -> RunStats:
        raw = dict(raw)
        if raw.get("ratio") is None:
            raw["ratio"] = math.inf
        return cls(**raw)


def _trial_chunk(instance: Instance, config: ExperimentConfig, lo: int, hi: int):
    n = instance.n
    counts = [0] * n
    weights = []
    opt = instance.opt
    opt_set = set(opt)
    solitary = [0] * len(opt)
    z_sum = [0.0] * len(opt)
    z_sq = [0.0] * len(opt)
    laminar = config.algorithm != "free-order"
    for t in range(lo, hi):
        rng = np.random.default_rng([config.seed, t])
        if config.algorithm == "free-order":
            out = simulate_free_order(instance, rng, phase2_order=config.phase2_order or "schedule").output
        elif config.algorithm == "laminar-simple":
            run = simulate_simple_laminar(instance, rng, phase2_order=config.phase2_order or "random")
            out = run.output
        else:
            q = IMPROVED_SAMPLE_PROB if config.q is None else config.q
            run = simulate_improved_laminar(instance, rng, q, phase2_order=config.phase2_order or "random")
            out = run.output
        if not instance.matroid.is_independent(out):
            raise InvariantViolation(f"trial {t} returned dependent set {sorted(out)}")
        for e in out:
            counts[e] += 1
        weights.append(instance.weight(out))
        if laminar:
            shared = {}
            for part in run.scheme.parts:
                in_opt = [f for f in part if f in opt_set]
                for f in in_opt:
                    shared[f] = len(in_opt)
            for i, f in enumerate(opt):
                if f in shared:
                    solitary[i] += shared[f] == 1
                    if f not in run.sample:
                        z = 1.0 / shared[f]
                        z_sum[i] += z
                        z_sq[i] += z * z
    return counts, weights, solitary, z_sum, z_sq


def run_trials(config: ExperimentConfig, instance: Instance | None = None) -> RunStats:
    """Run ``config.trials`` independent trials and aggregate them.

    Trials are split into contiguous ranges (one per worker) and merged in
    range order, so the result does not depend on ``workers``.
    """
    inst = instance if instance is not None else config.resolve_instance()
    if config.algorithm != "free-order" and not isinstance(inst.matroid, LaminarMatroid):
        raise ValidationError(f"{config.algorithm} needs a laminar instance")
    start = time.perf_counter()
    T = config.trials
    workers = max(1, config.workers)
    step = -(-T // workers)
    ranges = [(lo, min(T, lo + step)) for lo in range(0, T, step)]
    if workers == 1:
        parts = [_trial_chunk(inst, config, lo, hi) for lo, hi in ranges]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_trial_chunk, [inst] * len(ranges), [config] * len(ranges),
                                  *zip(*ranges)))
    counts = np.sum([p[0] for p in parts], axis=0) if inst.n else np.zeros(0)
    weights = np.concatenate([np.asarray(p[1], dtype=float) for p in parts])
    mean = math.fsum(weights) / T
    std = float(np.std(weights, ddof=1)) if T > 1 else 0.0
    half = Z95 * std / math.sqrt(T)
    opt_w = inst.opt_weight
    ratio = opt_w / mean if mean > 0 else (1.0 if opt_w == 0 else math.inf)
    diagnostics = {}
    if config.algorithm != "free-order":
        k = len(inst.opt)
        diagnostics = {
            "solitary_freq": [sum(p[2][i] for p in parts) / T for i in range(k)],
            "z_mean": [math.fsum(p[3][i] for p in parts) / T for i in range(k)],
            "z_sq_mean": [math.fsum(p[4][i] for p in parts) / T for i in range(k)],
        }
    return RunStats(
        instance=inst.name,
        algorithm=config.algorithm,
        trials=T,
        seed=config.seed,
        mean_weight=mean,
        std_weight=std,
        ci_lo=mean - half,
        ci_hi=mean + half,
        opt_weight=opt_w,
        ratio=ratio,
        frequencies=[float(c) / T for c in counts],
        phase2_order=config.phase2_order,
        q=(config.q or IMPROVED_SAMPLE_PROB) if config.algorithm == "laminar-improved" else None,
        wall_time=time.perf_counter() - start,
        opt=list(inst.opt),
        diagnostics=diagnostics,
    )


def _summary_row(obj) -> list:
    if isinstance(obj, ExactReport):
        e = obj.expected_weight
        return [obj.instance, obj.algorithm, obj.details.get("samples", ""), "", e, e, e, obj.opt_weight, obj.ratio]
    return [obj.instance, obj.algorithm, obj.trials, obj.seed, obj.mean_weight, obj.ci_lo, obj.ci_hi,
            obj.opt_weight, obj.ratio]


def _frequencies(obj) -> list[float]:
    return obj.selection_prob if isinstance(obj, ExactReport) else obj.frequencies


def summary_csv(results) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_COLUMNS)
    for obj in results:
        w.writerow([repr(x) if isinstance(x, float) else x for x in _summary_row(obj)])
    return buf.getvalue()


def frequencies_csv(results) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FREQUENCY_COLUMNS)
    for obj in results:
        for e, fr in enumerate(_frequencies(obj)):
            w.writerow([obj.instance, obj.algorithm, e, repr(float(fr))])
    return buf.getvalue()


def report_json(results) -> str:
    payload = [obj.to_dict() for obj in results]
    return json.dumps(payload[0] if len(payload) == 1 else payload, indent=2) + "\n"


def emit_report(results, fmt: str = "csv", path: str | Path | None = None) -> str:
    """Write one or more RunStats/ExactReport objects; return the main text.

    CSV writes the one-row-per-run summary to ``path`` and the long-format
    per-element frequencies next to it as ``<stem>.frequencies.csv``. JSON
    writes the objects field by field. Without ``path`` nothing is written.
    """
    if isinstance(results, (RunStats, ExactReport)):
        results = [results]
    if fmt == "csv":
        text = summary_csv(results)
        if path is not None:
            path = Path(path)
            path.write_text(text)
            path.with_name(path.stem + ".frequencies.csv").write_text(frequencies_csv(results))
    elif fmt == "json":
        text = report_json(results)
        if path is not None:
            Path(path).write_text(text)
    else:
        raise ValidationError(f"unknown report format {fmt!r}")
    return text


def load_run_stats(path: str | Path) -> list[RunStats]:
    raw = json.loads(Path(path).read_text())
    return [RunStats.from_dict(r) for r in (raw if isinstance(raw, list) else [raw])]
