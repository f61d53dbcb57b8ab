"""Root-question selection functions and the top-down questionnaire builder.

An elementary selection function picks the root question of a table.  A
:class:`CompositeSelector` classifies each subtable by a characteristic
function value, looks up the interval that value falls in, and applies the
elementary function assigned to that interval.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import IncompleteTableError, InvariantError, UndefinedValueError
from .model import (
    CHAR_FUNCTIONS,
    Leaf,
    Node,
    ProblemTable,
    Questionnaire,
    entropy,
    split_on,
)

#: Relative tolerance for treating two selection scores as tied.
SCORE_RTOL = 1e-9

_GREEDY_TOKENS = ("mc", "dh", "dhc", "qpf")


@dataclass(frozen=True, order=True)
class Rqsf:
    """Elementary root-question selection function.

    ``kind`` is one of ``mc`` (cheapest question), ``dh`` (largest entropy
    drop), ``dhc`` (largest entropy drop per unit cost), ``qpf`` (question
    preference function) or ``dumb``; ``k`` is the constant of a dumb function.
    """

    kind: str
    k: int = 0

    def __post_init__(self):
        if self.kind not in _GREEDY_TOKENS + ("dumb",):
            raise ValueError(f"unknown selection function kind {self.kind!r}")
        if self.kind == "dumb" and self.k < 0:
            raise ValueError("dumb function constant must be non-negative")

    @property
    def token(self) -> str:
        return f"d{self.k}" if self.kind == "dumb" else self.kind

    def __str__(self):
        return self.token


MIN_COST = Rqsf("mc")
MAX_ENTROPY_DROP = Rqsf("dh")
ENTROPY_DROP_PER_COST = Rqsf("dhc")
QPF = Rqsf("qpf")
GREEDY = (MIN_COST, MAX_ENTROPY_DROP, ENTROPY_DROP_PER_COST, QPF)


def dumb(k: int) -> Rqsf:
    return Rqsf("dumb", k)


def dumb_set(count: int) -> tuple[Rqsf, ...]:
    return tuple(dumb(k) for k in range(count))


def mixed_set(count: int) -> tuple[Rqsf, ...]:
    return GREEDY + dumb_set(count)


def parse_token(token: str) -> Rqsf:
    token = token.strip()
    if token in _GREEDY_TOKENS:
        return Rqsf(token)
    if token.startswith("d") and token[1:].isdigit():
        return dumb(int(token[1:]))
    raise ValueError(f"bad selection function token {token!r}")


# ---------------------------------------------------------------------------
# Elementary selection


def _argbest(scores: np.ndarray, maximize: bool) -> int:
    """Index of the best score; near-ties go to the lowest index."""
    if maximize:
        best = scores.max()
        ok = scores >= best - SCORE_RTOL * abs(best)
    else:
        best = scores.min()
        ok = scores <= best + SCORE_RTOL * abs(best)
    return int(np.flatnonzero(ok)[0])


def outcome_weights(t: ProblemTable) -> tuple[np.ndarray, np.ndarray]:
    """Normalized mass of outcome 0 and outcome 1 for every question."""
    p = t.probs / t.probs.sum()
    w1 = t.outcomes @ p
    return np.clip(1.0 - w1, 0.0, 1.0), w1


def _binary_entropy(w0: np.ndarray, w1: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -(np.where(w0 > 0, w0 * np.log2(w0), 0.0) + np.where(w1 > 0, w1 * np.log2(w1), 0.0))
    return np.maximum(h, 0.0)


def delta_entropy(t: ProblemTable, q: int) -> float:
    """Information gain of asking question index ``q`` on ``t``."""
    t0, t1 = split_on(t, q)
    total = t.mass
    w0, w1 = t0.mass / total, t1.mass / total
    cond = 0.0
    for w, sub in ((w0, t0), (w1, t1)):
        if w > 0:
            cond += w * entropy(sub)
    return entropy(t) - cond


def apply_elementary(f: Rqsf, t: ProblemTable) -> int:
    """Index (row of ``t``) of the question chosen by ``f``."""
    if t.k == 0:
        raise UndefinedValueError("no question to choose from")
    if f.kind == "dumb":
        return f.k % t.k
    if f.kind == "mc":
        return _argbest(t.costs, maximize=False)
    w0, w1 = outcome_weights(t)
    if f.kind == "dh":
        return _argbest(_binary_entropy(w0, w1), maximize=True)
    if f.kind == "dhc":
        return _argbest(_binary_entropy(w0, w1) / t.costs, maximize=True)
    # qpf: a question with an empty-mass outcome scores +inf
    with np.errstate(divide="ignore"):
        score = t.costs / w0 + t.costs / w1
    if np.isinf(score).all():
        return _argbest(t.costs, maximize=False)
    return _argbest(score, maximize=False)


# ---------------------------------------------------------------------------
# Interval systems and composite selectors


@dataclass(frozen=True)
class IntervalSystem:
    """Closed upper bounds of consecutive intervals; the last bound is ``+inf``."""

    boundaries: tuple[float, ...]
    mode: str = "dynamic"
    char_fn: str = "entropy"

    def __post_init__(self):
        b = self.boundaries
        if not b or b[-1] != math.inf:
            raise ValueError("interval system needs at least one interval ending at +inf")
        if any(x >= y for x, y in zip(b, b[1:])):
            raise ValueError("interval boundaries must be strictly increasing")
        if self.mode not in ("dynamic", "fixed"):
            raise ValueError(f"unknown interval mode {self.mode!r}")
        if self.char_fn not in CHAR_FUNCTIONS:
            raise ValueError(f"unknown characteristic function {self.char_fn!r}")

    def __len__(self):
        return len(self.boundaries)

    @classmethod
    def equal_width(cls, count: int, lo: float, hi: float, char_fn: str) -> "IntervalSystem":
        """``count`` intervals of equal width spanning ``[lo, hi]``."""
        if count < 1:
            raise ValueError("need at least one interval")
        width = (hi - lo) / count if hi > lo else 1.0 / count
        bounds = [lo + width * (i + 1) for i in range(count - 1)]
        return cls(tuple(bounds) + (math.inf,), "fixed", char_fn)


def locate_interval(system: IntervalSystem, value: float) -> int:
    """Smallest ``i`` with ``value <= boundaries[i]``."""
    return bisect.bisect_left(system.boundaries, value)


@dataclass(frozen=True)
class CompositeSelector:
    intervals: IntervalSystem
    assignment: tuple[Rqsf, ...]

    def __post_init__(self):
        if len(self.assignment) != len(self.intervals):
            raise ValueError(
                f"{len(self.assignment)} functions for {len(self.intervals)} intervals"
            )

    @property
    def char_fn(self) -> str:
        return self.intervals.char_fn

    def select(self, value: float) -> Rqsf:
        return self.assignment[locate_interval(self.intervals, value)]

    def replace(self, i: int, f: Rqsf) -> "CompositeSelector":
        a = list(self.assignment)
        a[i] = f
        return CompositeSelector(self.intervals, tuple(a))

    @classmethod
    def constant(cls, f: Rqsf, char_fn: str = "entropy", system: IntervalSystem | None = None):
        system = system or IntervalSystem((math.inf,), "dynamic", char_fn)
        return cls(system, (f,) * len(system))

    def dumps(self) -> str:
        """Two lines: interval upper bounds, then function tokens."""
        bounds = " ".join("inf" if b == math.inf else repr(b) for b in self.intervals.boundaries)
        return f"{self.intervals.mode} {self.char_fn}\n{bounds}\n{' '.join(f.token for f in self.assignment)}\n"

    @classmethod
    def loads(cls, text: str) -> "CompositeSelector":
        head, bounds, tokens = text.strip().splitlines()[:3]
        mode, char_fn = head.split()
        b = tuple(math.inf if x == "inf" else float(x) for x in bounds.split())
        return cls(IntervalSystem(b, mode, char_fn), tuple(parse_token(x) for x in tokens.split()))


# ---------------------------------------------------------------------------
# Builder


class SubproblemCache:
    """Memoizes splits, characteristic values and choices for subtables of one root.

    A subtable is identified by its event labels: the surviving questions
    are determined by the event set, so the key is unambiguous as long as
    every table passed in descends from the same root.
    """

    def __init__(self):
        self._splits: dict = {}
        self._values: dict = {}
        self._choices: dict = {}

    def split(self, t: ProblemTable, q: int) -> tuple[ProblemTable, ProblemTable]:
        key = (t.key, q)
        out = self._splits.get(key)
        if out is None:
            out = self._splits[key] = split_on(t, q)
        return out

    def value(self, t: ProblemTable, char_fn: str) -> float:
        key = (t.key, char_fn)
        v = self._values.get(key)
        if v is None:
            v = self._values[key] = CHAR_FUNCTIONS[char_fn](t)
        return v

    def choose(self, f: Rqsf, t: ProblemTable) -> int:
        key = (t.key, f)
        q = self._choices.get(key)
        if q is None:
            q = self._choices[key] = apply_elementary(f, t)
        return q


@dataclass(frozen=True)
class BuildRecord:
    """What the builder did at one internal node."""

    events: tuple[int, ...]
    value: float
    interval: int
    rqsf: Rqsf
    question: int


def build_with_cost(
    sel: CompositeSelector,
    t: ProblemTable,
    cache: SubproblemCache | None = None,
    records: list[BuildRecord] | None = None,
) -> tuple[Questionnaire, float]:
    """Build the questionnaire of ``sel`` on ``t`` and its cost.

    The cost is accumulated as ``sum(c(question) * mass(subtable))`` over
    internal nodes, which equals the path-sum cost for unnormalized masses.
    """
    cache = cache or SubproblemCache()
    char_fn = sel.char_fn

    def rec(sub: ProblemTable) -> tuple[Questionnaire, float]:
        if sub.n == 1:
            return Leaf(sub.event_labels[0]), 0.0
        if sub.k == 0:
            raise IncompleteTableError(f"events {sub.event_labels} cannot be separated")
        if not sub.mass > 0:
            # costs nothing whatever is asked; finish it without consulting the selector
            q = cache.choose(MIN_COST, sub)
            t0, t1 = cache.split(sub, q)
            return Node(sub.question_labels[q], rec(t0)[0], rec(t1)[0]), 0.0
        try:
            v = cache.value(sub, char_fn)
        except UndefinedValueError as exc:
            raise InvariantError(str(exc)) from exc
        i = locate_interval(sel.intervals, v)
        f = sel.assignment[i]
        q = cache.choose(f, sub)
        label = sub.question_labels[q]
        if records is not None:
            records.append(BuildRecord(sub.key, v, i, f, label))
        t0, t1 = cache.split(sub, q)
        q0, c0 = rec(t0)
        q1, c1 = rec(t1)
        return Node(label, q0, q1), float(sub.costs[q]) * sub.mass + c0 + c1

    return rec(t)


def build_questionnaire(
    sel: CompositeSelector, t: ProblemTable, cache: SubproblemCache | None = None
) -> Questionnaire:
    return build_with_cost(sel, t, cache)[0]


def build_elementary(f: Rqsf, t: ProblemTable, cache: SubproblemCache | None = None) -> Questionnaire:
    """Questionnaire of a single elementary function applied at every node."""
    cache = cache or SubproblemCache()

    def rec(sub: ProblemTable) -> Questionnaire:
        if sub.n == 1:
            return Leaf(sub.event_labels[0])
        if sub.k == 0:
            raise IncompleteTableError(f"events {sub.event_labels} cannot be separated")
        q = cache.choose(f, sub)
        t0, t1 = cache.split(sub, q)
        return Node(sub.question_labels[q], rec(t0), rec(t1))

    return rec(t)


# ---------------------------------------------------------------------------
# Dynamic intervals


def boundaries_from_values(values: Iterable[float]) -> tuple[float, ...]:
    """Midpoint boundaries between adjacent distinct values, closed at the top."""
    distinct = sorted(set(values))
    out = []
    for a, b in zip(distinct, distinct[1:]):
        mid = (a + b) / 2
        # a one-ulp gap can round the midpoint onto b
        out.append(mid if a <= mid < b else a)
    out.append(math.inf)
    return tuple(out)


def backfill(
    boundaries: Sequence[float], count: int, lo: float, hi: float
) -> tuple[tuple[float, ...], list[int]]:
    """Split the widest interval in half until there are ``count`` intervals.

    The last interval is treated as ending at ``hi``.  Returns the new
    boundaries and, for each new interval, the index of the original interval
    it came from.
    """
    spans = []
    prev = lo
    for i, b in enumerate(boundaries):
        top = b if b != math.inf else max(hi, prev)
        spans.append([prev, top, i])
        prev = top
    while len(spans) < count:
        j = max(range(len(spans)), key=lambda s: (spans[s][1] - spans[s][0], -s))
        a, b, src = spans[j]
        if not b - a > 0:
            break
        mid = (a + b) / 2
        spans[j : j + 1] = [[a, mid, src], [mid, b, src]]
    bounds = [s[1] for s in spans[:-1]] + [math.inf]
    return tuple(bounds), [s[2] for s in spans]


def selector_from_records(
    values: Sequence[float],
    functions: Sequence[Rqsf],
    char_fn: str,
    min_intervals: int | None = None,
    bounds: tuple[float, float] | None = None,
) -> CompositeSelector:
    """Dynamic selector centred on the given subproblem values.

    Each interval receives the function that was applied to the subproblems
    whose value it contains.  Equal values share one interval.
    """
    by_value: dict[float, Rqsf] = {}
    for v, f in zip(values, functions):
        prev = by_value.setdefault(v, f)
        if prev != f:
            raise InvariantError(f"value {v} was resolved by both {prev} and {f}")
    if not by_value:
        by_value = {0.0: functions[0] if functions else Rqsf("qpf")}
    ordered = sorted(by_value)
    b = boundaries_from_values(ordered)
    assignment = [by_value[v] for v in ordered]
    if min_intervals is not None and len(b) < min_intervals:
        lo, hi = bounds if bounds is not None else (ordered[0], ordered[-1])
        b, src = backfill(b, min_intervals, min(lo, ordered[0]), max(hi, ordered[-1]))
        assignment = [assignment[i] for i in src]
    return CompositeSelector(IntervalSystem(b, "dynamic", char_fn), tuple(assignment))


def dynamic_intervals(
    q: Questionnaire,
    t: ProblemTable,
    char_fn: str,
    cache: SubproblemCache | None = None,
) -> IntervalSystem:
    """Interval system with one interval per distinct subproblem value of ``q``."""
    cache = cache or SubproblemCache()
    values = [cache.value(sub, char_fn) for sub in _internal_tables(q, t, cache)]
    return IntervalSystem(boundaries_from_values(values), "dynamic", char_fn)


def _internal_tables(q: Questionnaire, t: ProblemTable, cache: SubproblemCache):
    stack = [(q, t)]
    while stack:
        node, sub = stack.pop()
        # zero-mass subtrees are finished by MinCost, outside the selector
        if isinstance(node, Leaf) or not sub.mass > 0:
            continue
        yield sub
        t0, t1 = cache.split(sub, sub.question_index(node.question))
        stack.append((node.one, t1))
        stack.append((node.zero, t0))


def rebuild_intervals_preserving(
    old: CompositeSelector,
    q: Questionnaire,
    t: ProblemTable,
    cache: SubproblemCache | None = None,
) -> CompositeSelector:
    """Re-centre the intervals of ``old`` on the subproblems of ``q``.

    Every subproblem keeps the elementary function ``old`` applied to it, so
    the returned selector rebuilds ``q`` exactly.
    """
    cache = cache or SubproblemCache()
    values, functions = [], []
    stack = [(q, t)]
    while stack:
        node, sub = stack.pop()
        if isinstance(node, Leaf) or not sub.mass > 0:
            continue
        v = cache.value(sub, old.char_fn)
        f = old.select(v)
        chosen = sub.question_labels[cache.choose(f, sub)]
        if chosen != node.question:
            raise InvariantError(
                f"selector picks question {chosen} where the questionnaire asks {node.question}"
            )
        values.append(v)
        functions.append(f)
        t0, t1 = cache.split(sub, sub.question_index(node.question))
        stack.append((node.one, t1))
        stack.append((node.zero, t0))
    if not values:
        return CompositeSelector.constant(old.assignment[0], old.char_fn)
    return selector_from_records(values, functions, old.char_fn)
