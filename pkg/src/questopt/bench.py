"""Random instance generators and the solver comparison harness."""
from __future__ import annotations

import csv
import io
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import CapExceededError, InfeasibleError
from .genetic import GaParams, evolve
from .local_search import LsConfig, local_search
from .model import ProblemTable, questionnaire_cost
from .oracles import exact_owbq
from .reductions import KnapsackInstance, SetCoverInstance
from .rqsf import QPF, build_elementary

METHODS = ("qpf", "ls-dumb", "ls-greedy", "ls-mixed", "ga", "exact")
COLUMNS = ("opt", "qpf", "dumb", "greedy", "mixed", "ga")
CSV_HEADER = ("test",) + COLUMNS + tuple(f"t_{c}_ms" for c in COLUMNS)


def generate_instance(
    n: int,
    k: int,
    seed: int,
    cost_range: tuple[float, float] = (1.0, 10.0),
    prob_mode: str = "uniform",
) -> ProblemTable:
    """Random complete table with distinct columns and no senseless question."""
    if n < 2 or k < 1:
        raise ValueError("need n >= 2 and k >= 1")
    if 2**k < n:
        raise InfeasibleError(f"{k} questions cannot separate {n} events")
    if prob_mode not in ("uniform", "random"):
        raise ValueError(f"unknown prob_mode {prob_mode!r}")
    rng = np.random.default_rng(seed)
    while True:
        cols: set[int] = set()
        order: list[int] = []
        while len(order) < n:
            c = int(rng.integers(0, 2**k))
            if c not in cols:
                cols.add(c)
                order.append(c)
        bits = np.array([[(c >> i) & 1 for c in order] for i in range(k)], dtype=np.uint8)
        for i in range(k):
            while bits[i].min() == bits[i].max():
                bits[i] = rng.integers(0, 2, size=n)
        if len({bits[:, j].tobytes() for j in range(n)}) == n:
            break
    lo, hi = cost_range
    costs = np.round(rng.uniform(lo, hi, size=k), 2)
    costs = np.maximum(costs, 0.01)
    if prob_mode == "uniform":
        probs = np.full(n, 1.0 / n)
    else:
        probs = rng.dirichlet(np.ones(n))
    return ProblemTable(bits, costs, probs)


def generate_set_cover(universe_size: int, m: int, seed: int, weighted: bool = False) -> SetCoverInstance:
    """Random feasible set cover instance with distinct non-empty subsets."""
    if m < 1 or universe_size < 1:
        raise ValueError("need at least one element and one subset")
    if 2**universe_size - 1 < m:
        raise InfeasibleError("not enough distinct subsets")
    rng = np.random.default_rng(seed)
    while True:
        masks: list[int] = []
        while len(masks) < m:
            x = int(rng.integers(1, 2**universe_size))
            if x not in masks:
                masks.append(x)
        covered = 0
        for x in masks:
            covered |= x
        if covered == 2**universe_size - 1:
            break
    subsets = [[e for e in range(universe_size) if x >> e & 1] for x in masks]
    weights = [float(w) for w in rng.integers(1, 10, size=m)] if weighted else None
    return SetCoverInstance(universe_size, subsets, weights)


def generate_knapsack(n: int, seed: int, with_values: bool = False) -> KnapsackInstance:
    rng = np.random.default_rng(seed)
    weights = [float(w) for w in rng.integers(1, 20, size=n)]
    capacity = float(rng.integers(1, max(2, int(sum(weights)))))
    values = [float(v) for v in rng.integers(1, 20, size=n)] if with_values else None
    return KnapsackInstance(weights, capacity, values)


# ---------------------------------------------------------------------------
# Harness


@dataclass(frozen=True)
class BenchConfig:
    seed: int = 0
    exact_cap: int = 12
    max_iterations: int = 1000
    ga: GaParams = GaParams()


@dataclass
class BenchRow:
    test: str
    opt: float | None = None
    qpf: float | None = None
    dumb: float | None = None
    greedy: float | None = None
    mixed: float | None = None
    ga: float | None = None
    times_ms: dict = field(default_factory=dict)
    errors: list = field(default_factory=list)


def solve(t: ProblemTable, method: str, seed: int = 0, max_iterations: int = 1000,
          ga: GaParams | None = None, exact_cap: int = 14):
    """Run one method; returns ``(questionnaire, cost)``."""
    if method == "qpf":
        q = build_elementary(QPF, t)
        return q, questionnaire_cost(q, t)
    if method.startswith("ls-"):
        res = local_search(t, LsConfig(method[3:], max_iterations=max_iterations))
        return res.questionnaire, res.cost
    if method == "ga":
        params = replace(ga or GaParams(), seed=seed)
        res = evolve(t, params)
        return res.questionnaire, res.cost
    if method == "exact":
        res = exact_owbq(t, cap=exact_cap)
        return res.witness, res.value
    raise ValueError(f"unknown method {method!r}")


_COLUMN_METHOD = {"opt": "exact", "qpf": "qpf", "dumb": "ls-dumb", "greedy": "ls-greedy",
                  "mixed": "ls-mixed", "ga": "ga"}


def bench_one(item: tuple[str, ProblemTable], config: BenchConfig) -> BenchRow:
    name, t = item
    row = BenchRow(name)
    for col in COLUMNS:
        if col == "opt" and t.n > config.exact_cap:
            continue
        start = time.perf_counter()
        try:
            _, cost = solve(t, _COLUMN_METHOD[col], config.seed, config.max_iterations,
                            config.ga, config.exact_cap)
        except (ValueError, RuntimeError, CapExceededError) as exc:
            row.errors.append(f"{col}: {exc}")
            continue
        row.times_ms[col] = (time.perf_counter() - start) * 1000.0
        setattr(row, col, cost)
    return row


def _worker_count() -> int:
    try:
        return max(1, int(os.environ.get("QUESTOPT_THREADS", "1")))
    except ValueError:
        return 1


def run_bench(instances: Sequence[tuple[str, ProblemTable]], config: BenchConfig = BenchConfig()) -> list[BenchRow]:
    """One row per instance, in input order."""
    workers = min(_worker_count(), max(1, len(instances)))
    if workers == 1:
        return [bench_one(item, config) for item in instances]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(bench_one, instances, [config] * len(instances)))


def _cell(x) -> str:
    return "" if x is None else f"{x:.6f}"


def bench_csv(rows: Sequence[BenchRow]) -> str:
    """CSV of the rows plus a final ``sum`` row of column totals."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    totals = {c: 0.0 for c in COLUMNS}
    time_totals = {c: 0.0 for c in COLUMNS}
    for r in rows:
        w.writerow(
            [r.test]
            + [_cell(getattr(r, c)) for c in COLUMNS]
            + [_cell(r.times_ms.get(c)) for c in COLUMNS]
        )
        for c in COLUMNS:
            totals[c] += getattr(r, c) or 0.0
            time_totals[c] += r.times_ms.get(c, 0.0)
    w.writerow(["sum"] + [_cell(totals[c]) for c in COLUMNS] + [_cell(time_totals[c]) for c in COLUMNS])
    return buf.getvalue()
