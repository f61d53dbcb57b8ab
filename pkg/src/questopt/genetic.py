"""Genetic algorithm over genotypes of selection functions.

A genotype assigns one elementary function to each of ``L`` equal-width
intervals of the characteristic function's theoretical range.  Offspring are
added to the population as they are produced and the least fit individuals
are trimmed once per generation, so the best individual always survives.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import IncompleteTableError
from .local_search import improves
from .model import ProblemTable, Questionnaire, char_bounds, validate_table
from .rqsf import (
    GREEDY,
    CompositeSelector,
    IntervalSystem,
    Rqsf,
    SubproblemCache,
    build_with_cost,
    dumb_set,
    parse_token,
)


@dataclass(frozen=True)
class GaParams:
    population_size: int = 40
    mating_rate: float = 1.0
    mutation_rate: float = 0.3
    genotype_length: int | None = None
    generations_without_improvement: int = 15
    max_generations: int = 150
    rqsf_set: str | tuple[Rqsf, ...] = "mixed"
    char_fn: str = "entropy"
    seed: int = 0
    dumb_count: int | None = None
    literal_scaling: bool = False

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be at least 2")
        if not self.mating_rate > 0:
            raise ValueError("mating_rate must be positive")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError("mutation_rate must be a probability")
        if self.genotype_length is not None and self.genotype_length < 1:
            raise ValueError("genotype_length must be positive")
        if self.generations_without_improvement < 1 or self.max_generations < 1:
            raise ValueError("halting parameters must be positive")
        if not isinstance(self.rqsf_set, str):
            object.__setattr__(self, "rqsf_set", tuple(self.rqsf_set))

    def functions(self, k: int) -> tuple[Rqsf, ...]:
        if not isinstance(self.rqsf_set, str):
            return self.rqsf_set
        count = k if self.dumb_count is None else self.dumb_count
        return {
            "greedy": GREEDY,
            "dumb": dumb_set(max(count, 1)),
            "mixed": GREEDY + dumb_set(count),
        }[self.rqsf_set]

    def length(self, n: int, k: int) -> int:
        return self.genotype_length or max(1, n * k)


@dataclass(frozen=True)
class Genotype:
    genes: tuple[Rqsf, ...]

    def __len__(self):
        return len(self.genes)

    def dumps(self) -> str:
        return " ".join(g.token for g in self.genes) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Genotype":
        return cls(tuple(parse_token(x) for x in text.split()))


@dataclass(frozen=True)
class GenerationRow:
    generation: int
    best_cost: float
    mean_cost: float
    evaluations: int


@dataclass
class GaResult:
    questionnaire: Questionnaire | None
    genotype: Genotype
    cost: float
    log: list[GenerationRow] = field(default_factory=list)


def generation_log_csv(log: Sequence[GenerationRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["generation", "best_cost", "mean_cost", "evaluations"])
    for r in log:
        w.writerow([r.generation, repr(r.best_cost), repr(r.mean_cost), r.evaluations])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Representation and operators


def genotype_selector(g: Genotype, t: ProblemTable, char_fn: str) -> CompositeSelector:
    lo, hi = char_bounds(char_fn, t)
    return CompositeSelector(IntervalSystem.equal_width(len(g), lo, hi, char_fn), g.genes)


def decode(
    g: Genotype, t: ProblemTable, char_fn: str = "entropy", cache: SubproblemCache | None = None
) -> Questionnaire:
    return build_with_cost(genotype_selector(g, t, char_fn), t, cache)[0]


def crossover(a: Genotype, b: Genotype, point: int) -> tuple[Genotype, Genotype]:
    """One-point crossover: swap the tails after ``point``."""
    if len(a) != len(b):
        raise ValueError("parents differ in length")
    if not 1 <= point <= len(a) - 1:
        raise ValueError(f"crossover point {point} outside 1..{len(a) - 1}")
    return (
        Genotype(a.genes[:point] + b.genes[point:]),
        Genotype(b.genes[:point] + a.genes[point:]),
    )


def mutation_size(length: int, k: int) -> int:
    """Genes changed per mutation: genotype length over question count, rounded up."""
    return min(length, max(1, math.ceil(length / max(k, 1))))


def mutate(
    g: Genotype,
    rng: np.random.Generator,
    functions: Sequence[Rqsf],
    k: int,
    rate: float = 1.0,
) -> Genotype:
    """With probability ``rate`` replace ``ceil(L/k)`` distinct genes by other functions."""
    if len(functions) < 2 or rate <= 0.0 or rng.random() >= rate:
        return g
    genes = list(g.genes)
    positions = rng.choice(len(genes), size=mutation_size(len(genes), k), replace=False)
    for pos in positions:
        others = [f for f in functions if f != genes[pos]]
        genes[pos] = others[int(rng.integers(len(others)))]
    return Genotype(tuple(genes))


def selection_weight(costs: Sequence[float], literal: bool = False) -> np.ndarray:
    """Mating weights from costs; cheaper individuals weigh more.

    The weight is ``max(cost) - cost`` plus a small floor so every individual
    stays selectable.  ``literal=True`` uses ``cost - min(cost)`` instead,
    which favours expensive individuals.
    """
    c = np.asarray(costs, dtype=float)
    if c.size == 0:
        raise ValueError("no costs given")
    floor = 1e-9 * (1.0 + float(np.abs(c).max()))
    scaled = c - c.min() if literal else c.max() - c
    return scaled + floor


# ---------------------------------------------------------------------------
# Evolution


def run_ga(
    objective: Callable[[Genotype], float],
    functions: Sequence[Rqsf],
    length: int,
    n_questions: int,
    params: GaParams,
) -> tuple[Genotype, float, list[GenerationRow]]:
    """Generic steady-state GA loop minimizing ``objective``."""
    rng = np.random.default_rng(params.seed)
    functions = tuple(functions)
    memo: dict[Genotype, float] = {}
    evaluations = 0

    def fitness(g: Genotype) -> float:
        nonlocal evaluations
        c = memo.get(g)
        if c is None:
            c = memo[g] = objective(g)
            evaluations += 1
        return c

    def random_genotype() -> Genotype:
        idx = rng.integers(len(functions), size=length)
        return Genotype(tuple(functions[i] for i in idx))

    population = [random_genotype() for _ in range(params.population_size)]
    costs = [fitness(g) for g in population]

    def row(gen: int) -> GenerationRow:
        return GenerationRow(gen, min(costs), float(np.mean(costs)), evaluations)

    log = [row(0)]
    matings = max(1, round(params.population_size * params.mating_rate))
    stale = generation = 0
    while stale < params.generations_without_improvement and generation < params.max_generations:
        previous_best = min(costs)
        for _ in range(matings):
            w = selection_weight(costs, params.literal_scaling)
            p = w / w.sum()
            male = int(rng.choice(len(population), p=p))
            female = int(rng.choice(len(population), p=p))
            if female == male:
                female = int(rng.choice(len(population), p=p))
            if length > 1:
                point = int(rng.integers(1, length))
                kids = crossover(population[male], population[female], point)
            else:
                kids = (population[male], population[female])
            for kid in kids:
                kid = mutate(kid, rng, functions, n_questions, params.mutation_rate)
                population.append(kid)
                costs.append(fitness(kid))
        # stable sort: among equal costs the older individual survives
        order = sorted(range(len(population)), key=costs.__getitem__)[: params.population_size]
        order.sort()
        population = [population[i] for i in order]
        costs = [costs[i] for i in order]
        generation += 1
        stale = 0 if improves(min(costs), previous_best) else stale + 1
        log.append(row(generation))
    best = min(range(len(population)), key=costs.__getitem__)
    return population[best], costs[best], log


def evolve(t: ProblemTable, params: GaParams = GaParams()) -> GaResult:
    """Run the GA on an OWBQ table; returns the best questionnaire found."""
    report = validate_table(t)
    if not report.complete:
        raise IncompleteTableError(f"events {report.witness} cannot be separated")
    cache = SubproblemCache()
    lo, hi = char_bounds(params.char_fn, t)
    length = params.length(t.n, t.k)
    system = IntervalSystem.equal_width(length, lo, hi, params.char_fn)

    def objective(g: Genotype) -> float:
        return build_with_cost(CompositeSelector(system, g.genes), t, cache)[1]

    functions = params.functions(t.k)
    best, cost, log = run_ga(objective, functions, length, t.k, params)
    q, _ = build_with_cost(CompositeSelector(system, best.genes), t, cache)
    return GaResult(q, best, cost, log)
