"""Set cover and 0-1 knapsack expressed as questionnaire problems.

Set cover: every element becomes an event, every subset a question, and an
extra all-zero event ``y0`` is added that carries almost all of the
probability.  The questions on the branch that identifies ``y0`` form a
cover, and an optimal questionnaire yields a minimum cover.

Knapsack: every item becomes an event together with a question that checks
for that single event and costs the item's weight.  Questionnaires whose
branches may not cost more than the knapsack capacity are scored by the
degree of identification of the event partition they induce.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import (
    InconsistentQuestionnaireError,
    InfeasibleError,
    MalformedInstanceError,
)
from .genetic import GaParams, Genotype, run_ga
from .local_search import LsConfig, best_improvement
from .model import CHAR_FUNCTIONS, Leaf, Node, ProblemTable, char_bounds, split_on
from .rqsf import (
    QPF,
    CompositeSelector,
    IntervalSystem,
    apply_elementary,
    locate_interval,
    selector_from_records,
)

# ---------------------------------------------------------------------------
# Set cover


@dataclass(frozen=True)
class SetCoverInstance:
    universe_size: int
    subsets: tuple[frozenset, ...]
    weights: tuple[float, ...] | None = None

    def __init__(self, universe_size: int, subsets, weights=None):
        subsets = tuple(frozenset(int(e) for e in s) for s in subsets)
        object.__setattr__(self, "universe_size", int(universe_size))
        object.__setattr__(self, "subsets", subsets)
        object.__setattr__(self, "weights", None if weights is None else tuple(float(w) for w in weights))
        if self.universe_size < 1:
            raise MalformedInstanceError("universe must not be empty")
        for s in subsets:
            if any(not 0 <= e < self.universe_size for e in s):
                raise MalformedInstanceError(f"subset {sorted(s)} leaves the universe")
        if len(set(subsets)) != len(subsets):
            raise MalformedInstanceError("duplicate subsets")
        if self.weights is not None:
            if len(self.weights) != len(subsets):
                raise MalformedInstanceError("one weight per subset required")
            if not all(w > 0 and math.isfinite(w) for w in self.weights):
                raise MalformedInstanceError("weights must be positive")
        missing = set(range(self.universe_size)).difference(*subsets) if subsets else set(range(self.universe_size))
        if missing:
            raise InfeasibleError(f"elements {sorted(missing)} are covered by no subset")

    @property
    def m(self) -> int:
        return len(self.subsets)

    def weight_of(self, chosen) -> float:
        if self.weights is None:
            return float(len(chosen))
        return float(sum(self.weights[i] for i in chosen))

    def is_cover(self, chosen) -> bool:
        covered = set().union(*(self.subsets[i] for i in chosen)) if chosen else set()
        return len(covered) == self.universe_size


@dataclass(frozen=True)
class SetCoverMapping:
    """Links the reduced table back to the set cover instance."""

    y0: int
    event_elements: dict
    question_subsets: dict
    epsilon: float


def weight_resolution(weights: Sequence[float]) -> float:
    """Smallest positive difference between the weights of two subfamilies."""
    if all(float(w).is_integer() for w in weights):
        return 1.0
    if len(weights) > 20:
        raise ValueError("pass an explicit resolution for more than 20 fractional weights")
    sums = {0.0}
    for w in weights:
        sums |= {s + w for s in sums}
    ordered = sorted(sums)
    gaps = [b - a for a, b in zip(ordered, ordered[1:]) if b - a > 1e-12]
    return min(gaps) if gaps else 1.0


def reduce_set_cover(
    sc: SetCoverInstance, resolution: float | None = None
) -> tuple[ProblemTable, SetCoverMapping]:
    """Questionnaire table whose optimal ``y0`` branch is a minimum cover.

    Elements with identical membership are merged into one event.  The
    small event probability is ``g / (2 n (W + g))`` where ``W`` is the total
    subset weight and ``g`` the weight resolution; unweighted this is
    ``1 / (2 n (k + 1))``.
    """
    used = [i for i, s in enumerate(sc.subsets) if s]
    groups: dict[tuple, list[int]] = {}
    for e in range(sc.universe_size):
        sig = tuple(int(e in sc.subsets[i]) for i in used)
        groups.setdefault(sig, []).append(e)
    signatures = sorted(groups, key=lambda s: groups[s][0])
    n = len(signatures)
    weights = [1.0] * len(used) if sc.weights is None else [sc.weights[i] for i in used]
    g = weight_resolution(weights) if resolution is None else float(resolution)
    eps = g / (2 * n * (sum(weights) + g))
    outcomes = np.zeros((len(used), n + 1), dtype=np.uint8)
    for j, sig in enumerate(signatures, start=1):
        outcomes[:, j] = sig
    probs = np.full(n + 1, eps)
    probs[0] = 1.0 - n * eps
    table = ProblemTable(outcomes, weights, probs, range(n + 1), used)
    mapping = SetCoverMapping(
        0,
        {j: tuple(groups[sig]) for j, sig in enumerate(signatures, start=1)},
        {i: i for i in used},
        eps,
    )
    return table, mapping


def extract_cover(q, mapping: SetCoverMapping) -> frozenset:
    """Subsets asked on the path from the root to the ``y0`` leaf."""
    path = _path_to(q, mapping.y0, ())
    if path is None:
        raise InconsistentQuestionnaireError("questionnaire has no leaf for y0")
    return frozenset(mapping.question_subsets[x] for x in path)


def _path_to(q, event: int, acc: tuple) -> tuple | None:
    if isinstance(q, Leaf):
        return acc if q.event == event else None
    return _path_to(q.zero, event, acc + (q.question,)) or _path_to(q.one, event, acc + (q.question,))


# ---------------------------------------------------------------------------
# Knapsack and limited-depth questionnaires


@dataclass(frozen=True)
class KnapsackInstance:
    item_weights: tuple[float, ...]
    capacity: float
    item_values: tuple[float, ...] | None = None

    def __init__(self, item_weights, capacity, item_values=None):
        object.__setattr__(self, "item_weights", tuple(float(w) for w in item_weights))
        object.__setattr__(self, "capacity", float(capacity))
        object.__setattr__(
            self, "item_values", None if item_values is None else tuple(float(v) for v in item_values)
        )
        if not self.item_weights:
            raise MalformedInstanceError("knapsack needs at least one item")
        if not all(w > 0 and math.isfinite(w) for w in self.item_weights):
            raise MalformedInstanceError("item weights must be positive")
        if not (self.capacity >= 0 and math.isfinite(self.capacity)):
            raise MalformedInstanceError("capacity must be non-negative")
        if self.item_values is not None:
            if len(self.item_values) != len(self.item_weights):
                raise MalformedInstanceError("one value per item required")
            if not all(v > 0 for v in self.item_values):
                raise MalformedInstanceError("item values must be positive")

    @property
    def n(self) -> int:
        return len(self.item_weights)


@dataclass(frozen=True)
class Block:
    """Leaf of a limited-depth questionnaire: events left unseparated."""

    events: tuple[int, ...]


LdqTree = Union[Node, Block]


@dataclass(frozen=True)
class LdqInstance:
    table: ProblemTable
    budget: float
    sizes: tuple[float, ...]

    def __post_init__(self):
        if len(self.sizes) != self.table.n:
            raise MalformedInstanceError("one size per event required")
        if any(s < 0 for s in self.sizes):
            raise MalformedInstanceError("event sizes must be non-negative")
        if abs(sum(self.sizes) - 1.0) > 1e-9:
            raise MalformedInstanceError("event sizes must sum to 1")
        if self.budget < 0:
            raise MalformedInstanceError("budget must be non-negative")

    def size_of(self, events) -> float:
        idx = self.table.event_labels
        return float(sum(self.sizes[idx.index(e)] for e in events))


@dataclass(frozen=True)
class Partition:
    blocks: tuple[tuple[int, ...], ...]
    masses: tuple[float, ...]
    sizes: tuple[float, ...]

    def __post_init__(self):
        flat = [e for b in self.blocks for e in b]
        if len(flat) != len(set(flat)):
            raise MalformedInstanceError("partition blocks overlap")
        if not (len(self.blocks) == len(self.masses) == len(self.sizes)):
            raise MalformedInstanceError("one mass and one size per block required")


def identification_degree(p: Partition) -> float:
    """``sum(size(block) * mass(block))``; lower means finer identification."""
    return float(sum(d * m for d, m in zip(p.sizes, p.masses)))


def partition_of(tree: LdqTree, inst: LdqInstance) -> Partition:
    blocks = []

    def walk(node):
        if isinstance(node, Block):
            blocks.append(node.events)
        else:
            walk(node.zero)
            walk(node.one)

    walk(tree)
    prob = dict(zip(inst.table.event_labels, inst.table.probs))
    return Partition(
        tuple(blocks),
        tuple(float(sum(prob[e] for e in b)) for b in blocks),
        tuple(inst.size_of(b) for b in blocks),
    )


def reduce_knapsack(ks: KnapsackInstance, use_values: bool = False) -> LdqInstance:
    """One single-event check per item, costing the item's weight.

    ``use_values=True`` is an experimental encoding that makes event
    probabilities proportional to item values instead of uniform.
    """
    n = ks.n
    if use_values and ks.item_values is not None:
        probs = np.asarray(ks.item_values) / sum(ks.item_values)
    else:
        probs = np.full(n, 1.0 / n)
    if n == 1:
        table = ProblemTable(np.zeros((0, 1)), [], probs)
    else:
        table = ProblemTable(np.eye(n, dtype=np.uint8), ks.item_weights, probs)
    return LdqInstance(table, ks.capacity, (1.0 / n,) * n)


#: Slack when comparing a question's cost with the remaining branch budget.
BUDGET_TOL = 1e-9


def affordable(t: ProblemTable, budget: float) -> ProblemTable:
    """``t`` restricted to the questions that fit the remaining budget."""
    keep = t.costs <= budget + BUDGET_TOL
    if keep.all():
        return t
    return ProblemTable(
        t.outcomes[keep],
        t.costs[keep],
        t.probs,
        t.event_labels,
        [lab for lab, k in zip(t.question_labels, keep) if k],
    )


def ldq_tree(
    sel: CompositeSelector, inst: LdqInstance, records: list | None = None
) -> LdqTree:
    """Top-down construction where each branch stays within the budget."""
    char_fn = CHAR_FUNCTIONS[sel.char_fn]

    def rec(sub: ProblemTable, budget: float) -> LdqTree:
        if sub.n == 1:
            return Block(sub.event_labels)
        sub = affordable(sub, budget)
        # a zero-mass block adds nothing to D, so splitting it is pointless
        if sub.k == 0 or not sub.mass > 0:
            return Block(sub.event_labels)
        v = char_fn(sub)
        f = sel.assignment[locate_interval(sel.intervals, v)]
        q = apply_elementary(f, sub)
        if records is not None:
            records.append((v, f))
        t0, t1 = split_on(sub, q)
        rest = budget - float(sub.costs[q])
        return Node(sub.question_labels[q], rec(t0, rest), rec(t1, rest))

    return rec(inst.table, inst.budget)


def ldq_build(sel: CompositeSelector, inst: LdqInstance) -> tuple[Partition, float]:
    p = partition_of(ldq_tree(sel, inst), inst)
    return p, identification_degree(p)


def ldq_recentre(sel: CompositeSelector, inst: LdqInstance) -> CompositeSelector:
    """Dynamic intervals on the tree's subproblems, back-filled to ``n - 1`` intervals."""
    records: list = []
    ldq_tree(sel, inst, records)
    if not records:
        return sel
    t = inst.table
    bounds = char_bounds(sel.char_fn, t) if t.k else (0.0, 1.0)
    values = [v for v, _ in records]
    functions = [f for _, f in records]
    return selector_from_records(values, functions, sel.char_fn, max(t.n - 1, 1), bounds)


def ldq_local_search(inst: LdqInstance, cfg: LsConfig = LsConfig()):
    """Local search minimizing the degree of identification; returns ``(tree, selector, D)``."""
    functions = cfg.functions(inst.table)
    f0 = QPF if QPF in functions else functions[0]
    start = ldq_recentre(CompositeSelector.constant(f0, cfg.char_fn), inst)

    def evaluate(sel):
        return ldq_build(sel, inst)[1]

    sel, d, _trace, _it, _ev = best_improvement(
        start, functions, evaluate, lambda s: ldq_recentre(s, inst), cfg.max_iterations
    )
    return ldq_tree(sel, inst), sel, d


def ldq_evolve(inst: LdqInstance, params: GaParams = GaParams()):
    """GA minimizing the degree of identification; returns ``(tree, genotype, D)``."""
    t = inst.table
    lo, hi = char_bounds(params.char_fn, t) if t.k else (0.0, 1.0)
    length = params.length(t.n, max(t.k, 1))
    system = IntervalSystem.equal_width(length, lo, hi, params.char_fn)

    def objective(g: Genotype) -> float:
        return ldq_build(CompositeSelector(system, g.genes), inst)[1]

    best, d, _log = run_ga(objective, params.functions(t.k), length, max(t.k, 1), params)
    return ldq_tree(CompositeSelector(system, best.genes), inst), best, d


def knapsack_packing(tree: LdqTree, inst: LdqInstance, ks: KnapsackInstance | None = None) -> frozenset:
    """Items packed by a questionnaire of a reduced knapsack.

    These are the checks on the branch where every answer is "no"; if that
    branch ends in a single unchecked item that still fits, it is packed too.
    Pass ``ks`` so a one-item knapsack (whose table has no questions) can
    still pack its item.
    """
    t = inst.table
    cost = dict(zip(t.question_labels, t.costs))
    if ks is not None:
        cost = dict(enumerate(ks.item_weights))
    packed, spent, node = [], 0.0, tree
    while isinstance(node, Node):
        packed.append(node.question)
        spent += float(cost[node.question])
        node = node.zero
    if len(node.events) == 1:
        (e,) = node.events
        if e not in packed and e in cost and spent + cost[e] <= inst.budget + BUDGET_TOL:
            packed.append(e)
    return frozenset(packed)


def knapsack_degree(n: int, m: int) -> float:
    """Degree of identification after ``m`` single-event checks on ``n`` uniform events."""
    return m / n**2 + (n - m) ** 2 / n**2


def enumerate_check_subsets(ks: KnapsackInstance):
    """All item subsets that fit the capacity (for small oracle checks)."""
    for r in range(ks.n + 1):
        for combo in itertools.combinations(range(ks.n), r):
            if sum(ks.item_weights[i] for i in combo) <= ks.capacity + BUDGET_TOL:
                yield combo
