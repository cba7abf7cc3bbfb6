"""Exhaustive oracles for small instances.

Everything here enumerates: all subsets for optima and axioms, all sample
sets for the expectations of the two-phase algorithms, all arrival orders
(or the closed form) for the threshold rule inside a part. Spans come from
a table of ranks of every subset, and the laminar partitions are rebuilt
from their set-by-set definition rather than through the interval tricks of
:mod:`matsec.laminar`, so agreement between the two is evidence.

Probabilities are doubles; sums go through :func:`math.fsum`, which rounds
once and therefore does not depend on how the enumeration was chunked.
"""

from __future__ import annotations

import itertools
import json
import math
from collections.abc import Mapping
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from .errors import SizeLimitExceeded
from .free_order import run_free_order
from .instance import Instance
from .laminar import IMPROVED_SAMPLE_PROB, SIMPLE_SAMPLE_PROB
from .matroids import LaminarMatroid
from .secretary import run_threshold_rule, threshold_index

TOL = 1e-9
MAX_BRUTE_N = 20
MAX_FREE_ORDER_N = 14
MAX_LAMINAR_N = 12
MAX_ENUM_PART = 8


@dataclass
class ExactReport:
    instance: str
    algorithm: str
    n: int
    opt: list[int]
    opt_weight: float
    expected_weight: float
    selection_prob: list[float]
    solitary_prob: dict[int, float] | None = None
    z_expectation: dict[int, float] | None = None
    violations: list[str] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def ratio(self) -> float:
        if self.expected_weight > 0:
            return self.opt_weight / self.expected_weight
        return 1.0 if self.opt_weight == 0 else math.inf

    def to_dict(self) -> dict:
        out = asdict(self)
        out["ratio"] = None if math.isinf(self.ratio) else self.ratio
        return out

    @classmethod
    def from_dict(cls, raw: dict) -> ExactReport:
        raw = dict(raw)
        raw.pop("ratio", None)
        for name in ("solitary_prob", "z_expectation"):
            if raw.get(name) is not None:
                raw[name] = {int(k): v for k, v in raw[name].items()}
        return cls(**raw)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


@dataclass(frozen=True)
class AxiomReport:
    passed: bool
    axiom: str | None = None  # "empty", "downward" or "exchange"
    witness: tuple | None = None  # (I, J) as sorted tuples

    def __bool__(self):
        return self.passed


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def rank_table(matroid) -> np.ndarray:
    """``rank`` of every subset, indexed by bitmask."""
    n = matroid.n
    return np.fromiter((matroid.rank(_bits(m)) for m in range(1 << n)), dtype=np.int64, count=1 << n)


def span_by_rank(ranks: np.ndarray, n: int, S: int) -> int:
    """Bitmask of ``{f : rank(S + f) = rank(S)}``."""
    r = ranks[S]
    return sum(1 << f for f in range(n) if ranks[S | (1 << f)] == r)


def brute_opt(instance: Instance) -> frozenset:
    """Best independent set over all ``2^n`` subsets.

    Sets are compared by total weight and then by their keys listed best
    first, which singles out the same set the tie-broken greedy returns.
    """
    n = instance.n
    if n > MAX_BRUTE_N:
        raise SizeLimitExceeded(f"brute_opt enumerates 2^n subsets; n={n} > {MAX_BRUTE_N}")
    best, best_score = frozenset(), None
    for mask in range(1 << n):
        S = _bits(mask)
        if not instance.matroid.is_independent(S):
            continue
        score = (instance.weight(S), tuple(sorted((instance.key(e) for e in S), reverse=True)))
        if best_score is None or score > best_score:
            best, best_score = frozenset(S), score
    return best


def axiom_check(matroid, n: int | None = None) -> AxiomReport:
    """Check the independence axioms exhaustively.

    ``matroid`` only needs ``is_independent``; ``n`` defaults to ``matroid.n``.
    Downward closure is checked one removal at a time, exchange on pairs with
    ``|I| = |J| + 1``, which implies the general case under downward closure.
    """
    n = matroid.n if n is None else n
    if n > 16:
        raise SizeLimitExceeded(f"axiom_check enumerates pairs of subsets; n={n} is too large")
    full = 1 << n
    indep = np.fromiter((bool(matroid.is_independent(_bits(m))) for m in range(full)), dtype=bool, count=full)
    if not indep[0]:
        return AxiomReport(False, "empty", ((), ()))
    for m in np.flatnonzero(indep).tolist():
        for f in _bits(m):
            if not indep[m ^ (1 << f)]:
                return AxiomReport(False, "downward", (tuple(_bits(m)), tuple(_bits(m ^ (1 << f)))))

    masks = np.arange(full, dtype=np.int64)
    sizes = np.array([bin(m).count("1") for m in range(full)], dtype=np.int64)
    by_size = [masks[indep & (sizes == s)] for s in range(n + 1)]
    for s in range(n):
        bigger = by_size[s + 1]
        if bigger.size == 0:
            continue
        for J in by_size[s].tolist():
            ext = 0
            for f in range(n):
                if not J >> f & 1 and indep[J | (1 << f)]:
                    ext |= 1 << f
            bad = (bigger & ~J & ext) == 0
            if bad.any():
                I = int(bigger[np.argmax(bad)])
                return AxiomReport(False, "exchange", (tuple(_bits(I)), tuple(_bits(J))))
    return AxiomReport(True)


@lru_cache(maxsize=None)
def _enumerated_rank_dist(m: int) -> tuple[float, ...]:
    dist = secretary_selection_dist({k: -k for k in range(m)})
    return tuple(dist[k] for k in range(m))


def rank_selection_probabilities(m: int, r: int | None = None) -> list[float]:
    """Closed form for the chance that the rule picks the ``k``-th best of ``m``.

    The ``k``-th best (0-based) is picked at arrival ``t > r`` when it beats
    the ``t-1`` earlier arrivals and the best of those sits in the sample::

        P_k = (1/m) * sum_{t=r+1}^{m} C(m-1-k, t-1) / C(m-1, t-1) * r / (t-1)

    With ``r = 0`` the first arrival is always taken.
    """
    if r is None:
        r = threshold_index(m)
    if not 0 <= r < m:
        raise ValueError(f"need 0 <= r < m, got r={r}, m={m}")
    if r == 0:
        return [1.0 / m] * m
    return [
        math.fsum(
            math.comb(m - 1 - k, t - 1) / math.comb(m - 1, t - 1) * r / (t - 1) for t in range(r + 1, m + 1)
        )
        / m
        for k in range(m)
    ]


@lru_cache(maxsize=None)
def _rank_dist(m: int) -> tuple[float, ...]:
    if m <= MAX_ENUM_PART:
        return _enumerated_rank_dist(m)
    return tuple(rank_selection_probabilities(m))


def secretary_selection_dist(keys, r: int | None = None, mode: str = "enumerate") -> dict:
    """Selection probability of every element of a part under random arrival order.

    ``keys`` maps element id to a comparable key (higher is better); a plain
    sequence is read as keys of elements ``0..m-1``. In
    ``"enumerate"`` mode the rule is run on all ``m!`` orders, which needs
    ``m <= 8``; ``"formula"`` uses the closed form for any ``m``. The
    probabilities may sum to less than 1: the rule can end empty-handed.
    """
    keys = dict(keys) if isinstance(keys, Mapping) else dict(enumerate(keys))
    m = len(keys)
    if m == 0:
        return {}
    ranked = sorted(keys, key=lambda e: keys[e], reverse=True)
    if mode == "formula":
        probs = rank_selection_probabilities(m, r)
        return dict(zip(ranked, probs))
    if mode != "enumerate":
        raise ValueError(f"unknown mode {mode!r}")
    if m > MAX_ENUM_PART:
        raise SizeLimitExceeded(f"enumerating {m}! orders; use mode='formula' above m={MAX_ENUM_PART}")
    counts = dict.fromkeys(ranked, 0)
    for perm in itertools.permutations(ranked):
        picked = run_threshold_rule([(e, keys[e]) for e in perm], r)
        if picked is not None:
            counts[picked] += 1
    total = math.factorial(m)
    return {e: c / total for e, c in counts.items()}


def _chunks(total: int, workers: int) -> list[tuple[int, int]]:
    pieces = max(1, workers) * 4
    step = max(1, -(-total // pieces))
    return [(lo, min(total, lo + step)) for lo in range(0, total, step)]


def _map_chunks(fn, instance, total, workers, *args):
    spans = _chunks(total, workers)
    if workers <= 1:
        return [fn(instance, lo, hi, *args) for lo, hi in spans]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, [instance] * len(spans), *zip(*spans), *([a] * len(spans) for a in args)))


def _free_order_chunk(instance: Instance, lo: int, hi: int):
    n = instance.n
    counts = [0] * n
    weights = []
    violations = []
    outputs = {}
    for mask in range(lo, hi):
        A = _bits(mask)
        out = run_free_order(instance, sample=A)
        outputs[mask] = sum(1 << e for e in out)
        for e in out:
            counts[e] += 1
        weights.append(instance.weight(out))
        if not instance.matroid.is_independent(out):
            violations.append(f"A={A}: output {sorted(out)} is dependent")
        for f in out:
            heavier = [a for a in A if instance.rank_of[a] < instance.rank_of[f]]
            if instance.matroid.rank(heavier + [f]) == instance.matroid.rank(heavier):
                violations.append(f"A={A}: accepted {f} is spanned by heavier sampled elements")
    return counts, weights, violations, outputs


def _j_tables(instance: Instance, ranks: np.ndarray, f: int):
    """j1 and j2 of ``f`` for every sample mask, from the rank table."""
    n = instance.n
    full = (1 << n) - 1
    masks = np.arange(1 << n, dtype=np.int64)
    fb = 1 << f
    j1 = np.full(1 << n, np.inf)
    j2 = np.full(1 << n, np.inf)
    prefix = 0
    for j, e in enumerate(instance.order, start=1):
        prefix |= 1 << e
        base = prefix & ~fb
        inside = masks & base
        outside = (full ^ masks) & base
        hit1 = (ranks[inside | fb] == ranks[inside]) & np.isinf(j1)
        hit2 = (ranks[outside | fb] == ranks[outside]) & np.isinf(j2)
        j1[hit1] = j
        j2[hit2] = j
    return j1, j2


def exact_free_order(instance: Instance, workers: int = 1) -> ExactReport:
    """Exact selection probabilities of the free-order algorithm over all ``2^n`` samples.

    Also evaluates ``j1``/``j2`` for every sample and optimum element and logs
    any case where ``f`` is unsampled with ``j1 <= j2`` yet not selected, and
    any ``S`` for which ``j1 <= j2`` fails at both ``S`` and its complement.
    """
    n = instance.n
    if n > MAX_FREE_ORDER_N:
        raise SizeLimitExceeded(f"exact_free_order enumerates 2^n samples; n={n} > {MAX_FREE_ORDER_N}")
    total = 1 << n
    counts = [0] * n
    weights: list[float] = []
    violations: list[str] = []
    outputs: dict[int, int] = {}
    for c, w, v, o in _map_chunks(_free_order_chunk, instance, total, workers):
        counts = [a + b for a, b in zip(counts, c)]
        weights.extend(w)
        violations.extend(v)
        outputs.update(o)

    ranks = rank_table(instance.matroid)
    full = total - 1
    selection_checked = symmetric_checked = 0
    complement = np.arange(total, dtype=np.int64) ^ full
    for f in instance.opt:
        j1, j2 = _j_tables(instance, ranks, f)
        ok = j1 <= j2
        fb = 1 << f
        for mask in np.flatnonzero(ok).tolist():
            if not mask & fb:
                selection_checked += 1
                if not outputs[mask] & fb:
                    violations.append(f"selection: f={f}, A={_bits(mask)} has j1<=j2, f unsampled, not selected")
        both_bad = ~ok & ~ok[complement]
        symmetric_checked += total
        for mask in np.flatnonzero(both_bad).tolist():
            violations.append(f"symmetry: f={f}, S={_bits(mask)} has j1>j2 at S and at its complement")

    return ExactReport(
        instance=instance.name,
        algorithm="free-order",
        n=n,
        opt=list(instance.opt),
        opt_weight=instance.opt_weight,
        expected_weight=math.fsum(weights) / total,
        selection_prob=[c / total for c in counts],
        violations=violations,
        details={"samples": total, "selection_cases": selection_checked, "symmetry_cases": symmetric_checked},
    )


def _oracle_greedy(instance: Instance, ranks: np.ndarray, mask: int) -> list[int]:
    chosen = 0
    out = []
    for e in instance.order:
        if mask >> e & 1 and ranks[chosen | (1 << e)] > ranks[chosen]:
            chosen |= 1 << e
            out.append(e)
    return out


class _LaminarDefinitions:
    """Odd/even and interval partitions rebuilt from their definitions, on position bitmasks."""

    def __init__(self, instance: Instance):
        tree = instance.matroid.tree
        self.n = instance.n
        self.pos = tree.position
        self.order = tree.order
        sets = []
        for members, _cap in tree.sets():
            sets.append((len(members), sum(1 << self.pos[e] for e in members)))
        # sets containing each position, smallest first
        self.containing = [
            [bits for _size, bits in sorted(sets) if bits >> p & 1] for p in range(self.n)
        ]

    def to_pos_mask(self, elems) -> int:
        return sum(1 << self.pos[e] for e in elems)

    def to_elems(self, pmask: int) -> frozenset:
        return frozenset(self.order[p] for p in _bits(pmask))

    def odd_even(self, A: int, opt_a: list[int]):
        n = self.n
        idx = sorted(self.pos[e] + 1 for e in opt_a)
        cuts = [0] + idx + [n]
        A_pos = self.to_pos_mask(_bits(A))
        odd, even = [], []
        for j in range(1, len(cuts)):
            part = 0
            for k in range(cuts[j - 1], cuts[j] + 1):
                if 1 <= k <= n and not A_pos >> (k - 1) & 1:
                    part |= 1 << (k - 1)
            if part:
                (odd if j % 2 == 1 else even).append(self.to_elems(part))
        return odd, even

    def interval(self, I: list[int]) -> dict[int, frozenset]:
        """``{anchor: block}`` for the partition of the whole ground set."""
        if not I:
            return {-1: frozenset(range(self.n))}
        I_pos = self.to_pos_mask(I)
        blocks: dict[int, int] = {}
        for i in range(self.n):
            L = next(bits for bits in self.containing[i] if bits & I_pos)
            hits = L & I_pos
            upto = hits & ((1 << (i + 1)) - 1)
            j = upto.bit_length() - 1 if upto else (hits & -hits).bit_length() - 1
            blocks[j] = blocks.get(j, 0) | (1 << i)
        return {self.order[j]: self.to_elems(b) for j, b in blocks.items()}


def _transversals_independent(ranks: np.ndarray, parts) -> bool:
    for pick in itertools.product(*parts):
        mask = sum(1 << e for e in pick)
        if ranks[mask] != len(pick):
            return False
    return True


def _laminar_chunk(instance: Instance, lo: int, hi: int, algorithm: str, q: float, check_feasibility: bool):
    n = instance.n
    ranks = rank_table(instance.matroid)
    defs = _LaminarDefinitions(instance)
    opt = set(instance.opt)
    full = (1 << n) - 1
    w = instance.weights
    rank_of = instance.rank_of

    sel_terms = [[] for _ in range(n)]
    weight_terms: list[float] = []
    part_opt_terms: list[float] = []
    solitary_terms = {f: [] for f in opt}
    z_terms = {f: [] for f in opt}
    violations: list[str] = []
    checked: set = set()

    for mask in range(lo, hi):
        size = bin(mask).count("1")
        p_a = q**size * (1 - q) ** (n - size)
        opt_a = _oracle_greedy(instance, ranks, mask)
        rest = frozenset(_bits(full ^ mask))
        if algorithm == "simple":
            if not opt_a:
                families = [(1.0, [rest] if rest else [])]
            else:
                odd, even = defs.odd_even(mask, opt_a)
                families = [(0.5, odd), (0.5, even)]
        else:
            blocks = defs.interval(opt_a)
            if opt_a and set(blocks) - set(opt_a):
                violations.append(f"A={_bits(mask)}: interval blocks anchored outside OPT_A")
            sampled = frozenset(_bits(mask))
            families = [(1.0, [b - sampled for b in blocks.values() if b - sampled])]
            if check_feasibility:
                key = ("full", tuple(sorted(tuple(sorted(b)) for b in blocks.values())))
                if key not in checked:
                    checked.add(key)
                    if not _transversals_independent(ranks, [sorted(b) for b in blocks.values()]):
                        violations.append(f"A={_bits(mask)}: a transversal of the interval partition is dependent")

        for coin_p, parts in families:
            if check_feasibility:
                key = tuple(sorted(tuple(sorted(p)) for p in parts))
                if key not in checked:
                    checked.add(key)
                    if not _transversals_independent(ranks, [sorted(p) for p in parts]):
                        violations.append(f"A={_bits(mask)}: a transversal of {key} is dependent")
            prob = p_a * coin_p
            lhs = 0.0
            rhs = []
            for part in parts:
                ranked = sorted(part, key=rank_of.__getitem__)
                dist = _rank_dist(len(ranked))
                for e, s in zip(ranked, dist):
                    sel_terms[e].append(prob * s)
                    weight_terms.append(prob * s * w[e])
                in_opt = [e for e in part if e in opt]
                if in_opt:
                    lhs += w[ranked[0]]
                    rhs.extend(w[f] / len(in_opt) for f in in_opt)
                if len(in_opt) == 1:
                    solitary_terms[in_opt[0]].append(prob)
                if algorithm == "improved":
                    for f in in_opt:
                        z_terms[f].append(prob / len(in_opt))
            part_opt_terms.append(prob * math.fsum(w[sorted(p, key=rank_of.__getitem__)[0]] for p in parts))
            if lhs < math.fsum(rhs) - TOL:
                violations.append(f"A={_bits(mask)}: part maxima {lhs} below OPT share {math.fsum(rhs)}")
    return sel_terms, weight_terms, part_opt_terms, solitary_terms, z_terms, violations, checked


def exact_laminar(instance: Instance, algorithm: str = "improved", q: float | None = None,
                  check_feasibility: bool = True, workers: int = 1) -> ExactReport:
    """Exact expectations of the odd/even (``"simple"``) or interval (``"improved"``) algorithm.

    Enumerates every sample set with its probability ``q^|A| (1-q)^(n-|A|)``
    and, for the odd/even algorithm, both outcomes of the coin; inside each
    part the threshold rule's selection distribution is exact. Reports the
    probability that each optimum element is alone among optimum elements in
    its part, and for the interval algorithm the expectation of ``Z(f)``
    (zero when ``f`` is sampled, else one over the number of optimum
    elements sharing its part).
    """
    if algorithm not in ("simple", "improved"):
        raise ValueError(f"algorithm must be 'simple' or 'improved', got {algorithm!r}")
    if not isinstance(instance.matroid, LaminarMatroid):
        raise ValueError("exact_laminar needs a laminar instance")
    n = instance.n
    if n > MAX_LAMINAR_N:
        raise SizeLimitExceeded(f"exact_laminar enumerates 2^n samples; n={n} > {MAX_LAMINAR_N}")
    if q is None:
        q = SIMPLE_SAMPLE_PROB if algorithm == "simple" else IMPROVED_SAMPLE_PROB
    total = 1 << n
    sel = [[] for _ in range(n)]
    weights, part_opt, violations = [], [], []
    solitary = {f: [] for f in instance.opt}
    z = {f: [] for f in instance.opt}
    schemes: set = set()
    for s, wt, po, so, zt, v, c in _map_chunks(
        _laminar_chunk, instance, total, workers, algorithm, q, check_feasibility
    ):
        for e in range(n):
            sel[e].extend(s[e])
        weights.extend(wt)
        part_opt.extend(po)
        for f in solitary:
            solitary[f].extend(so[f])
            z[f].extend(zt[f])
        violations.extend(v)
        schemes |= c

    z_exp = {f: math.fsum(t) for f, t in z.items()}
    opt_share = math.fsum(instance.weights[f] * z_exp[f] for f in z_exp)
    expected_part_opt = math.fsum(part_opt)
    if algorithm == "improved" and expected_part_opt < opt_share - TOL:
        violations.append(f"expected part maxima {expected_part_opt} below Z-weighted optimum {opt_share}")
    return ExactReport(
        instance=instance.name,
        algorithm="laminar-" + algorithm,
        n=n,
        opt=list(instance.opt),
        opt_weight=instance.opt_weight,
        expected_weight=math.fsum(weights),
        selection_prob=[math.fsum(t) for t in sel],
        solitary_prob={f: math.fsum(t) for f, t in solitary.items()},
        z_expectation=z_exp if algorithm == "improved" else None,
        violations=violations,
        details={
            "q": q,
            "samples": total,
            "schemes_checked": len(schemes),
            "expected_partition_opt": expected_part_opt,
            "z_weighted_opt": opt_share,
        },
    )
