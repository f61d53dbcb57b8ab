import numpy as np
import pytest

from questopt.bench import generate_instance
from questopt.genetic import (
    GaParams,
    Genotype,
    crossover,
    decode,
    evolve,
    generation_log_csv,
    mutate,
    mutation_size,
    run_ga,
    selection_weight,
)
from questopt.model import questionnaire_cost
from questopt.oracles import exact_owbq
from questopt.rqsf import GREEDY, MIN_COST, QPF, build_elementary, dumb

from conftest import small_instances

FAST = GaParams(population_size=16, generations_without_improvement=6, max_generations=40)


def _g(s):
    return Genotype(tuple(dumb(int(c)) for c in s))


def test_crossover_examples():
    a, b = _g("0000"), _g("1111")
    assert crossover(a, b, 1) == (_g("0111"), _g("1000"))
    assert crossover(a, b, 3) == (_g("0001"), _g("1110"))
    with pytest.raises(ValueError):
        crossover(a, b, 0)
    with pytest.raises(ValueError):
        crossover(a, _g("11"), 1)


def test_mutation_changes_expected_gene_count():
    assert mutation_size(10, 5) == 2
    assert mutation_size(7, 3) == 3
    rng = np.random.default_rng(0)
    funcs = GREEDY + (dumb(0),)
    g = Genotype((QPF,) * 10)
    for _ in range(20):
        m = mutate(g, rng, funcs, 5)
        assert sum(x != y for x, y in zip(g.genes, m.genes)) == 2


def test_mutation_rate_zero_and_two_functions():
    rng = np.random.default_rng(1)
    g = Genotype((QPF, MIN_COST, QPF))
    assert mutate(g, rng, (QPF, MIN_COST), 3, rate=0.0) == g
    m = mutate(g, rng, (QPF, MIN_COST), 3)
    flipped = [i for i in range(3) if m.genes[i] != g.genes[i]]
    assert len(flipped) == 1
    assert mutate(g, rng, (QPF,), 3) == g


def test_selection_weight():
    w = selection_weight([10.0, 12.0])
    d = 1e-9 * 13.0
    assert w == pytest.approx([2 + d, d], abs=1e-15)
    lit = selection_weight([10.0, 12.0], literal=True)
    assert lit == pytest.approx([d, 2 + d], abs=1e-15)
    assert (selection_weight([5.0, 5.0, 5.0]) > 0).all()


def test_all_qpf_decodes_to_elementary(a3):
    g = Genotype((QPF,) * (a3.n * a3.k))
    assert decode(g, a3) == build_elementary(QPF, a3)


def test_example_reaches_optimum(a3):
    res = evolve(a3, GaParams(seed=1))
    assert res.cost == pytest.approx(exact_owbq(a3).value)
    assert res.cost == pytest.approx(questionnaire_cost(res.questionnaire, a3))


def test_determinism():
    t = generate_instance(9, 6, 2, prob_mode="random")
    a = evolve(t, FAST)
    b = evolve(t, FAST)
    assert a.genotype == b.genotype and a.cost == b.cost and a.log == b.log


def test_log_properties():
    for t in small_instances(6, (5, 9), (4, 7), seed=8):
        res = evolve(t, FAST)
        best = [r.best_cost for r in res.log]
        assert all(b <= a for a, b in zip(best, best[1:]))
        assert res.cost == best[-1]
        assert res.cost >= exact_owbq(t).value - 1e-9
        assert len(res.log) <= FAST.max_generations + 1


def test_halting_on_stale_generations():
    calls = []

    def flat(g):
        calls.append(g)
        return 1.0

    _, cost, log = run_ga(flat, GREEDY, 4, 3, GaParams(population_size=4, generations_without_improvement=3))
    assert cost == 1.0 and len(log) == 4


def test_population_and_gene_pool_closed():
    funcs = (QPF, dumb(1))
    seen = set()

    def objective(g):
        assert len(g) == 6
        seen.update(g.genes)
        return sum(x == QPF for x in g.genes)

    best, cost, log = run_ga(objective, funcs, 6, 3, GaParams(population_size=8, seed=4))
    assert seen <= set(funcs)
    assert cost == 0 and best == Genotype((dumb(1),) * 6)


def test_genotype_and_log_serialization(a3):
    g = Genotype((QPF, dumb(3), MIN_COST))
    assert Genotype.loads(g.dumps()) == g
    res = evolve(a3, FAST)
    assert generation_log_csv(res.log).splitlines()[0] == "generation,best_cost,mean_cost,evaluations"


def test_params_validation():
    for bad in ({"population_size": 1}, {"mutation_rate": 1.5}, {"mating_rate": 0},
                {"genotype_length": 0}, {"max_generations": 0}):
        with pytest.raises(ValueError):
            GaParams(**bad)
    assert GaParams().length(5, 4) == 20
