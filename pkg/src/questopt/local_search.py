"""Best-improvement local search over composite selectors.

The neighbourhood of a selector is every selector obtained by changing the
function assigned to one interval.  The interval system stays frozen while
neighbours are scored; once the cheapest neighbour is accepted the intervals
are re-centred on the new questionnaire's subproblems without changing the
questionnaire it builds.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import IncompleteTableError, InvariantError
from .model import ProblemTable, Questionnaire, validate_table
from .rqsf import (
    GREEDY,
    QPF,
    CompositeSelector,
    Rqsf,
    SubproblemCache,
    build_with_cost,
    dumb_set,
    rebuild_intervals_preserving,
)

#: Relative margin a neighbour must beat the incumbent by to count as cheaper.
IMPROVEMENT_RTOL = 1e-9


def improves(new: float, old: float) -> bool:
    return new < old - IMPROVEMENT_RTOL * max(1.0, abs(old))


@dataclass(frozen=True)
class LsConfig:
    """Local search settings.

    ``rqsf_set`` is either an explicit sequence of functions or one of the
    families ``"greedy"``, ``"dumb"``, ``"mixed"``.  Dumb families contain
    ``dumb_count`` constants (default: one per question of the table).
    """

    rqsf_set: str | tuple[Rqsf, ...] = "mixed"
    char_fn: str = "entropy"
    max_iterations: int = 1000
    dumb_count: int | None = None

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if isinstance(self.rqsf_set, str):
            if self.rqsf_set not in ("greedy", "dumb", "mixed"):
                raise ValueError(f"unknown function family {self.rqsf_set!r}")
        else:
            object.__setattr__(self, "rqsf_set", tuple(self.rqsf_set))
            if not self.rqsf_set:
                raise ValueError("rqsf_set must not be empty")

    def functions(self, t: ProblemTable) -> tuple[Rqsf, ...]:
        if not isinstance(self.rqsf_set, str):
            return self.rqsf_set
        count = t.k if self.dumb_count is None else self.dumb_count
        if self.rqsf_set == "greedy":
            return GREEDY
        if self.rqsf_set == "dumb":
            return dumb_set(max(count, 1))
        return GREEDY + dumb_set(count)


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    cost: float
    neighbors_evaluated: int


@dataclass
class LocalSearchResult:
    questionnaire: Questionnaire
    selector: CompositeSelector
    cost: float
    trace: list[TraceRow] = field(default_factory=list)
    iterations: int = 0
    evaluations: int = 0


def trace_csv(trace: Sequence[TraceRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["iteration", "cost", "neighbors_evaluated"])
    for row in trace:
        w.writerow([row.iteration, repr(row.cost), row.neighbors_evaluated])
    return buf.getvalue()


def best_improvement(
    start: CompositeSelector,
    functions: Sequence[Rqsf],
    evaluate: Callable[[CompositeSelector], float],
    recentre: Callable[[CompositeSelector], CompositeSelector],
    max_iterations: int,
    on_step: Callable[[int, CompositeSelector, float], None] | None = None,
) -> tuple[CompositeSelector, float, list[TraceRow], int, int]:
    """Generic best-improvement loop; returns selector, cost, trace, iterations, evaluations.

    ``evaluate`` scores a selector (lower is better) and ``recentre`` rebuilds
    the interval system of an accepted selector.
    """
    current = start
    cost = evaluate(current)
    trace = [TraceRow(0, cost, 0)]
    evaluations = 0
    iteration = 0
    while iteration < max_iterations:
        iteration += 1
        best_sel, best_cost, seen = None, cost, 0
        for i, assigned in enumerate(current.assignment):
            for f in functions:
                if f == assigned:
                    continue
                neighbour = current.replace(i, f)
                c = evaluate(neighbour)
                seen += 1
                if improves(c, cost) and (best_sel is None or improves(c, best_cost)):
                    best_sel, best_cost = neighbour, c
        evaluations += seen
        if best_sel is None:
            break
        current, cost = recentre(best_sel), best_cost
        trace.append(TraceRow(iteration, cost, seen))
        if on_step is not None:
            on_step(iteration, current, cost)
    return current, cost, trace, iteration, evaluations


def initial_selector(t: ProblemTable, functions: Sequence[Rqsf], char_fn: str, cache=None) -> CompositeSelector:
    """All intervals on Qpf (or the first available function), centred on its questionnaire."""
    f0 = QPF if QPF in functions else functions[0]
    seed = CompositeSelector.constant(f0, char_fn)
    q, _ = build_with_cost(seed, t, cache)
    return rebuild_intervals_preserving(seed, q, t, cache)


def local_search(
    t: ProblemTable,
    cfg: LsConfig = LsConfig(),
    init: CompositeSelector | None = None,
    on_step: Callable[[int, Questionnaire, CompositeSelector], None] | None = None,
) -> LocalSearchResult:
    """Minimize questionnaire cost over composite selectors.

    ``on_step(iteration, questionnaire, selector)`` is called after each
    accepted move with the questionnaire of the accepted neighbour and the
    re-centred selector derived from it.
    """
    report = validate_table(t)
    if not report.complete:
        raise IncompleteTableError(f"events {report.witness} cannot be separated")
    cache = SubproblemCache()
    functions = cfg.functions(t)
    if init is None:
        init = initial_selector(t, functions, cfg.char_fn, cache)

    def evaluate(sel):
        return build_with_cost(sel, t, cache)[1]

    accepted: list[Questionnaire] = []

    def recentre(sel):
        q, _ = build_with_cost(sel, t, cache)
        new = rebuild_intervals_preserving(sel, q, t, cache)
        if build_with_cost(new, t, cache)[0] != q:
            raise InvariantError("re-centred selector builds a different questionnaire")
        accepted.append(q)
        return new

    def step_cb(iteration, sel, _cost):
        on_step(iteration, accepted[-1], sel)

    sel, cost, trace, iterations, evaluations = best_improvement(
        init, functions, evaluate, recentre, cfg.max_iterations, step_cb if on_step else None
    )
    q, _ = build_with_cost(sel, t, cache)
    return LocalSearchResult(q, sel, cost, trace, iterations, evaluations)
