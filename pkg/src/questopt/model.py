"""Problem tables, arborescent questionnaires and their cost.

A problem table lists ``k`` binary questions over ``n`` events.  Row ``i``
of ``outcomes`` holds the answer of question ``i`` for every event.  Tables
produced by :func:`split_on` keep the original event/question labels and
carry *unnormalized* probability masses, so the cost of a questionnaire
decomposes additively over its subtrees.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence, Union

import numpy as np

from .errors import (
    InconsistentQuestionnaireError,
    MalformedInstanceError,
    SenselessSplitError,
    UndefinedValueError,
)

#: Tolerance used to decide that two real-valued costs are tied.
TIE_TOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ProblemTable:
    """``k`` binary questions over ``n`` events with costs and probabilities.

    ``outcomes[i, j]`` is the answer (0 or 1) of question ``i`` for event ``j``.
    """

    outcomes: np.ndarray
    costs: np.ndarray
    probs: np.ndarray
    event_labels: tuple[int, ...]
    question_labels: tuple[int, ...]

    def __init__(
        self,
        outcomes,
        costs,
        probs,
        event_labels: Sequence[int] | None = None,
        question_labels: Sequence[int] | None = None,
    ):
        probs = np.asarray(probs, dtype=float).reshape(-1)
        costs = np.asarray(costs, dtype=float).reshape(-1)
        n, k = probs.size, costs.size
        outcomes = np.asarray(outcomes)
        if outcomes.size == 0:
            outcomes = outcomes.reshape(k, n)
        if outcomes.ndim != 2 or outcomes.shape != (k, n):
            raise MalformedInstanceError(
                f"outcomes must have shape ({k}, {n}), got {outcomes.shape}"
            )
        if not np.isin(outcomes, (0, 1)).all():
            raise MalformedInstanceError("outcomes must contain only 0 and 1")
        outcomes = outcomes.astype(np.uint8)
        if n == 0:
            raise MalformedInstanceError("a table needs at least one event")
        if k and not (np.all(np.isfinite(costs)) and np.all(costs > 0)):
            raise MalformedInstanceError("question costs must be positive and finite")
        if not (np.all(np.isfinite(probs)) and np.all(probs >= 0)):
            raise MalformedInstanceError("probabilities must be non-negative")
        event_labels = tuple(range(n)) if event_labels is None else tuple(int(x) for x in event_labels)
        question_labels = (
            tuple(range(k)) if question_labels is None else tuple(int(x) for x in question_labels)
        )
        if len(event_labels) != n or len(set(event_labels)) != n:
            raise MalformedInstanceError("event labels must be unique, one per event")
        if len(question_labels) != k or len(set(question_labels)) != k:
            raise MalformedInstanceError("question labels must be unique, one per question")
        row_sums = outcomes.sum(axis=1)
        bad = np.flatnonzero((row_sums == 0) | (row_sums == n))
        if bad.size:
            raise MalformedInstanceError(
                f"question {question_labels[bad[0]]} is senseless (single outcome)"
            )
        object.__setattr__(self, "outcomes", _frozen(outcomes))
        object.__setattr__(self, "costs", _frozen(costs))
        object.__setattr__(self, "probs", _frozen(probs))
        object.__setattr__(self, "event_labels", event_labels)
        object.__setattr__(self, "question_labels", question_labels)

    @property
    def n(self) -> int:
        return self.probs.size

    @property
    def k(self) -> int:
        return self.costs.size

    @property
    def mass(self) -> float:
        """Total (unnormalized) probability mass of the events in the table."""
        return float(self.probs.sum())

    @property
    def key(self) -> tuple[int, ...]:
        """Event labels; identifies a subtable among the descendants of one root."""
        return self.event_labels

    def question_index(self, label: int) -> int:
        try:
            return self.question_labels.index(label)
        except ValueError:
            raise KeyError(f"question {label} is not in this table") from None

    def event_index(self, label: int) -> int:
        try:
            return self.event_labels.index(label)
        except ValueError:
            raise KeyError(f"event {label} is not in this table") from None

    def __eq__(self, other):
        if not isinstance(other, ProblemTable):
            return NotImplemented
        return (
            self.event_labels == other.event_labels
            and self.question_labels == other.question_labels
            and np.array_equal(self.outcomes, other.outcomes)
            and np.array_equal(self.costs, other.costs)
            and np.array_equal(self.probs, other.probs)
        )

    __hash__ = None

    def __repr__(self):
        return f"ProblemTable(n={self.n}, k={self.k}, events={self.event_labels})"


# ---------------------------------------------------------------------------
# Questionnaires


@dataclass(frozen=True)
class Leaf:
    event: int


@dataclass(frozen=True)
class Node:
    question: int
    zero: "Questionnaire"
    one: "Questionnaire"


Questionnaire = Union[Leaf, Node]


def leaves(q: Questionnaire) -> list[int]:
    """Event labels at the leaves, left (outcome 0) to right."""
    if isinstance(q, Leaf):
        return [q.event]
    return leaves(q.zero) + leaves(q.one)


def depth(q: Questionnaire) -> int:
    if isinstance(q, Leaf):
        return 0
    return 1 + max(depth(q.zero), depth(q.one))


def iter_subproblems(q: Questionnaire, t: ProblemTable) -> Iterator[tuple[Node, ProblemTable]]:
    """Yield ``(internal node, subtable it resolves)`` in pre-order."""
    if isinstance(q, Leaf):
        return
    yield q, t
    t0, t1 = split_on(t, t.question_index(q.question))
    yield from iter_subproblems(q.zero, t0)
    yield from iter_subproblems(q.one, t1)


def check_questionnaire(q: Questionnaire, t: ProblemTable) -> None:
    """Raise :class:`InconsistentQuestionnaireError` unless ``q`` fully resolves ``t``."""
    if sorted(leaves(q)) != sorted(t.event_labels):
        raise InconsistentQuestionnaireError("leaf events differ from the table's events")
    _check(q, t, ())


def _check(q: Questionnaire, t: ProblemTable, path: tuple[int, ...]) -> None:
    if isinstance(q, Leaf):
        if t.event_labels != (q.event,):
            raise InconsistentQuestionnaireError(
                f"leaf {q.event} reached with unresolved events {t.event_labels}"
            )
        return
    if q.question in path:
        raise InconsistentQuestionnaireError(f"question {q.question} repeated on a branch")
    if q.question not in t.question_labels:
        raise InconsistentQuestionnaireError(
            f"question {q.question} is unavailable or senseless for events {t.event_labels}"
        )
    t0, t1 = split_on(t, t.question_index(q.question))
    _check(q.zero, t0, path + (q.question,))
    _check(q.one, t1, path + (q.question,))


# ---------------------------------------------------------------------------
# Table operations


@dataclass(frozen=True)
class CompletenessReport:
    complete: bool
    witness: tuple[int, int] | None = None


def validate_table(t: ProblemTable) -> CompletenessReport:
    """Check that every pair of events is separated by some question."""
    seen: dict[bytes, int] = {}
    first = None
    for j in range(t.n):
        col = t.outcomes[:, j].tobytes()
        if col in seen:
            pair = (seen[col], j)
            if first is None or pair < first:
                first = pair
        else:
            seen[col] = j
    if first is None:
        return CompletenessReport(True)
    i, j = first
    return CompletenessReport(False, (t.event_labels[i], t.event_labels[j]))


def split_on(t: ProblemTable, q: int) -> tuple[ProblemTable, ProblemTable]:
    """Split ``t`` on question index ``q`` into its 0- and 1-subtables.

    Row ``q`` and every row that becomes senseless are dropped; masses are
    carried over unnormalized.
    """
    if not 0 <= q < t.k:
        raise IndexError(f"question index {q} out of range for k={t.k}")
    row = t.outcomes[q]
    ones = row.astype(bool)
    if ones.all() or not ones.any():
        raise SenselessSplitError(f"question {t.question_labels[q]} has a single outcome")
    return _subtable(t, q, ~ones), _subtable(t, q, ones)


def _subtable(t: ProblemTable, q: int, cols: np.ndarray) -> ProblemTable:
    sub = t.outcomes[:, cols]
    counts = sub.sum(axis=1)
    keep = (counts > 0) & (counts < sub.shape[1])
    keep[q] = False
    labels = t.event_labels
    qlabels = t.question_labels
    return ProblemTable(
        sub[keep],
        t.costs[keep],
        t.probs[cols],
        [labels[j] for j in np.flatnonzero(cols)],
        [qlabels[i] for i in np.flatnonzero(keep)],
    )


def questionnaire_cost(q: Questionnaire, t: ProblemTable) -> float:
    """Expected identification cost: sum of ``p(y) * cost of the path to y``."""
    if sorted(leaves(q)) != sorted(t.event_labels):
        raise InconsistentQuestionnaireError("leaf events differ from the table's events")
    cost_of = {lab: float(c) for lab, c in zip(t.question_labels, t.costs)}
    prob_of = {lab: float(p) for lab, p in zip(t.event_labels, t.probs)}
    total = 0.0
    stack = [(q, 0.0)]
    while stack:
        node, acc = stack.pop()
        if isinstance(node, Leaf):
            total += prob_of[node.event] * acc
            continue
        if node.question not in cost_of:
            raise InconsistentQuestionnaireError(f"unknown question {node.question}")
        acc += cost_of[node.question]
        stack.append((node.zero, acc))
        stack.append((node.one, acc))
    return total


# ---------------------------------------------------------------------------
# Characteristic functions


def _entropy_bits(weights: np.ndarray) -> float:
    w = weights[weights > 0]
    return float(-(w * np.log2(w)).sum())


def entropy(t: ProblemTable) -> float:
    """Shannon entropy (bits) of the normalized event masses of ``t``."""
    m = t.probs.sum()
    if not m > 0:
        raise UndefinedValueError("entropy of a table with zero total mass")
    return max(0.0, _entropy_bits(t.probs / m))


def compactness(t: ProblemTable) -> float:
    """Events per question, ``n / k``."""
    if t.k == 0:
        raise UndefinedValueError("compactness of a table without questions")
    return t.n / t.k


def cost_entropy(t: ProblemTable) -> float:
    """Entropy of the question costs read as a distribution."""
    if t.k == 0:
        raise UndefinedValueError("cost entropy of a table without questions")
    return max(0.0, _entropy_bits(t.costs / t.costs.sum()))


def char_bounds(char_fn: str, t: ProblemTable) -> tuple[float, float]:
    """Theoretical ``(min, max)`` of a characteristic function over subtables of ``t``."""
    n, r = t.n, t.k
    if char_fn == "entropy":
        return 0.0, math.log2(n) if n > 1 else 0.0
    if char_fn == "compactness":
        if r == 0:
            raise UndefinedValueError("compactness bounds need at least one question")
        return r / 2.0**r, 2.0**r / r
    if char_fn == "cost_entropy":
        return 0.0, math.log2(r) if r > 1 else 0.0
    raise ValueError(f"unknown characteristic function {char_fn!r}")


CHAR_FUNCTIONS = {
    "entropy": entropy,
    "compactness": compactness,
    "cost_entropy": cost_entropy,
}


# ---------------------------------------------------------------------------
# Worked example used throughout the tests and demos

A3_OUTCOMES = (
    (0, 0, 0, 0, 0, 1, 1, 1, 1),
    (0, 0, 0, 0, 1, 1, 1, 1, 1),
    (0, 0, 1, 1, 0, 0, 0, 0, 1),
    (0, 1, 0, 1, 0, 0, 0, 1, 0),
    (0, 0, 0, 0, 0, 0, 1, 0, 0),
)
A3_COSTS = (3.0, 7.0, 4.0, 5.0, 6.0)
A3_PROBS = (0.05, 0.10, 0.05, 0.30, 0.20, 0.05, 0.05, 0.15, 0.05)


def example_table() -> ProblemTable:
    """The nine-event, five-question worked example (labels are 0-based)."""
    return ProblemTable(A3_OUTCOMES, A3_COSTS, A3_PROBS)


def example_questionnaire() -> Questionnaire:
    """Hand-built questionnaire for :func:`example_table` (question ``i`` is label ``i-1``)."""
    y = Leaf
    left = Node(
        1,
        Node(3, Node(2, y(0), y(2)), Node(2, y(1), y(3))),
        y(4),
    )
    right = Node(2, Node(3, Node(4, y(5), y(6)), y(7)), y(8))
    return Node(0, left, right)
