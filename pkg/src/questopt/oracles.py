"""Exact solvers used as ground truth for the heuristics.

They work directly on event bitmasks and share no code with the selector
builders, so agreement between the two is meaningful.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Any, Iterator

import numpy as np

from .errors import CapExceededError, IncompleteTableError, InfeasibleError
from .model import Leaf, Node, ProblemTable, Questionnaire, questionnaire_cost
from .reductions import (
    BUDGET_TOL,
    Block,
    KnapsackInstance,
    LdqInstance,
    SetCoverInstance,
    partition_of,
)


@dataclass
class ExactResult:
    value: float
    witness: Any
    nodes_explored: int
    tree: Any = None


def _bitmasks(t: ProblemTable) -> list[int]:
    return [sum(1 << int(j) for j in np.flatnonzero(row)) for row in t.outcomes]


def exact_owbq(t: ProblemTable, cap: int = 14) -> ExactResult:
    """Minimum-cost questionnaire by memoized recursion over event subsets."""
    if t.n > cap:
        raise CapExceededError(f"exact search refuses n={t.n} > cap={cap}")
    qmasks = _bitmasks(t)
    costs = [float(c) for c in t.costs]
    probs = [float(p) for p in t.probs]
    memo: dict[int, tuple[float, int]] = {}

    def mass(mask: int) -> float:
        return sum(probs[j] for j in range(t.n) if mask >> j & 1)

    def best(mask: int) -> float:
        if mask & (mask - 1) == 0:
            return 0.0
        hit = memo.get(mask)
        if hit is not None:
            return hit[0]
        m = mass(mask)
        value, choice = math.inf, -1
        for i, qm in enumerate(qmasks):
            one = mask & qm
            if one == 0 or one == mask:
                continue
            v = costs[i] * m + best(mask ^ one) + best(one)
            if v < value:
                value, choice = v, i
        if choice < 0:
            raise IncompleteTableError("some events cannot be separated")
        memo[mask] = (value, choice)
        return value

    def tree(mask: int) -> Questionnaire:
        if mask & (mask - 1) == 0:
            return Leaf(t.event_labels[mask.bit_length() - 1])
        i = memo[mask][1]
        one = mask & qmasks[i]
        return Node(t.question_labels[i], tree(mask ^ one), tree(one))

    full = (1 << t.n) - 1
    value = best(full)
    return ExactResult(value, tree(full), len(memo))


def enumerate_questionnaires(t: ProblemTable) -> Iterator[Questionnaire]:
    """Every complete questionnaire of ``t`` (exponential; tiny tables only)."""
    qmasks = _bitmasks(t)

    def rec(mask: int) -> list[Questionnaire]:
        if mask & (mask - 1) == 0:
            return [Leaf(t.event_labels[mask.bit_length() - 1])]
        out = []
        for i, qm in enumerate(qmasks):
            one = mask & qm
            if one == 0 or one == mask:
                continue
            for a, b in itertools.product(rec(mask ^ one), rec(one)):
                out.append(Node(t.question_labels[i], a, b))
        return out

    yield from rec((1 << t.n) - 1)


def naive_owbq(t: ProblemTable, cap: int = 6) -> ExactResult:
    """Minimum over full enumeration, costed by path sums."""
    if t.n > cap:
        raise CapExceededError(f"naive enumeration refuses n={t.n} > cap={cap}")
    best, witness, count = math.inf, None, 0
    for q in enumerate_questionnaires(t):
        count += 1
        c = questionnaire_cost(q, t)
        if c < best:
            best, witness = c, q
    if witness is None:
        raise IncompleteTableError("table admits no complete questionnaire")
    return ExactResult(best, witness, count)


def brute_min_cover(sc: SetCoverInstance, cap: int = 20) -> ExactResult:
    """Minimum-cardinality (or minimum-weight) cover by exhaustive enumeration."""
    if sc.m > cap:
        raise CapExceededError(f"brute force refuses {sc.m} subsets > cap={cap}")
    universe = (1 << sc.universe_size) - 1
    masks = [sum(1 << e for e in s) for s in sc.subsets]
    explored = 0
    if sc.weights is None:
        for r in range(sc.m + 1):
            for combo in itertools.combinations(range(sc.m), r):
                explored += 1
                covered = 0
                for i in combo:
                    covered |= masks[i]
                if covered == universe:
                    return ExactResult(float(r), frozenset(combo), explored)
        raise InfeasibleError("no cover exists")
    best, witness = math.inf, None
    for r in range(sc.m + 1):
        for combo in itertools.combinations(range(sc.m), r):
            explored += 1
            covered = 0
            for i in combo:
                covered |= masks[i]
            if covered == universe:
                w = sum(sc.weights[i] for i in combo)
                if w < best:
                    best, witness = w, frozenset(combo)
    if witness is None:
        raise InfeasibleError("no cover exists")
    return ExactResult(best, witness, explored)


#: Largest scaled capacity the knapsack table may use.
MAX_SCALED_CAPACITY = 5_000_000


def knapsack_dp(ks: KnapsackInstance, scale: int = 1000, mode: str = "count") -> ExactResult:
    """Capacity-indexed dynamic program over integer-scaled weights.

    ``mode="count"`` maximizes the number of packed items, ``mode="value"``
    the total item value.
    """
    if mode not in ("count", "value"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "value" and ks.item_values is None:
        raise ValueError("value mode needs item values")
    cap = int(math.floor(ks.capacity * scale + 1e-6))
    if cap > MAX_SCALED_CAPACITY:
        raise CapExceededError(f"scaled capacity {cap} exceeds {MAX_SCALED_CAPACITY}")
    weights = [int(round(w * scale)) for w in ks.item_weights]
    gains = [1.0] * ks.n if mode == "count" else list(ks.item_values)
    best = np.zeros(cap + 1)
    take = np.zeros((ks.n, cap + 1), dtype=bool)
    for i, (w, g) in enumerate(zip(weights, gains)):
        if w > cap:
            continue
        cand = best[: cap + 1 - w] + g
        better = cand > best[w:] + 1e-12
        take[i, w:] = better
        best[w:] = np.where(better, cand, best[w:])
    chosen, c = [], cap
    for i in range(ks.n - 1, -1, -1):
        if take[i, c]:
            chosen.append(i)
            c -= weights[i]
    return ExactResult(float(best[cap]), frozenset(chosen), ks.n * (cap + 1))


def exact_ldq(inst: LdqInstance, cap: int = 12) -> ExactResult:
    """Minimum degree of identification under the branch budget, by enumeration.

    The witness is the optimal :class:`Partition`; ``tree`` holds the
    questionnaire that induces it.
    """
    t = inst.table
    if t.n > cap:
        raise CapExceededError(f"exact LDQ refuses n={t.n} > cap={cap}")
    qmasks = _bitmasks(t)
    costs = [float(c) for c in t.costs]
    probs = [float(p) for p in t.probs]
    sizes = list(inst.sizes)
    memo: dict[tuple[int, float], tuple[float, int]] = {}

    def leaf_value(mask: int) -> float:
        idx = [j for j in range(t.n) if mask >> j & 1]
        return sum(sizes[j] for j in idx) * sum(probs[j] for j in idx)

    def best(mask: int, budget: float) -> float:
        if mask & (mask - 1) == 0:
            return leaf_value(mask)
        key = (mask, round(budget, 9))
        hit = memo.get(key)
        if hit is not None:
            return hit[0]
        value, choice = leaf_value(mask), -1
        for i, qm in enumerate(qmasks):
            one = mask & qm
            if one == 0 or one == mask or costs[i] > budget + BUDGET_TOL:
                continue
            rest = budget - costs[i]
            v = best(mask ^ one, rest) + best(one, rest)
            if v < value - 1e-15:
                value, choice = v, i
        memo[key] = (value, choice)
        return value

    def tree(mask: int, budget: float):
        events = tuple(t.event_labels[j] for j in range(t.n) if mask >> j & 1)
        if mask & (mask - 1) == 0:
            return Block(events)
        i = memo[(mask, round(budget, 9))][1]
        if i < 0:
            return Block(events)
        one = mask & qmasks[i]
        rest = budget - costs[i]
        return Node(t.question_labels[i], tree(mask ^ one, rest), tree(one, rest))

    full = (1 << t.n) - 1
    value = best(full, inst.budget)
    root = tree(full, inst.budget)
    return ExactResult(value, partition_of(root, inst), len(memo), root)
