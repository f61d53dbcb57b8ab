import itertools

import pytest

from questopt.bench import generate_knapsack, generate_set_cover
from questopt.errors import InconsistentQuestionnaireError, InfeasibleError, MalformedInstanceError
from questopt.local_search import LsConfig
from questopt.genetic import GaParams
from questopt.model import Leaf, Node, validate_table
from questopt.oracles import brute_min_cover, enumerate_questionnaires, exact_ldq, exact_owbq, knapsack_dp
from questopt.reductions import (
    Block,
    KnapsackInstance,
    Partition,
    SetCoverInstance,
    enumerate_check_subsets,
    extract_cover,
    identification_degree,
    knapsack_degree,
    knapsack_packing,
    ldq_build,
    ldq_evolve,
    ldq_local_search,
    partition_of,
    reduce_knapsack,
    reduce_set_cover,
    weight_resolution,
)
from questopt.rqsf import QPF, CompositeSelector

EXAMPLE = SetCoverInstance(3, [{0, 1}, {1, 2}, {2}])


def test_set_cover_table_shape_and_epsilon():
    t, mapping = reduce_set_cover(EXAMPLE)
    assert (t.k, t.n) == (3, 4)
    assert mapping.epsilon == pytest.approx(1 / 24)
    assert t.probs[0] == pytest.approx(1 - 3 / 24)
    assert t.probs.sum() == pytest.approx(1.0)
    assert not t.outcomes[:, 0].any()
    assert all(t.outcomes[:, j].any() for j in range(1, 4))
    assert list(t.costs) == [1.0, 1.0, 1.0]
    assert validate_table(t).complete


def test_example_exact_cover():
    t, mapping = reduce_set_cover(EXAMPLE)
    cover = extract_cover(exact_owbq(t).witness, mapping)
    assert cover == {0, 1}
    assert brute_min_cover(EXAMPLE).value == 2


def test_single_subset_and_weights():
    sc = SetCoverInstance(3, [{0, 1, 2}])
    t, mapping = reduce_set_cover(sc)
    assert extract_cover(exact_owbq(t).witness, mapping) == {0}
    weighted = SetCoverInstance(3, [{0, 1}, {1, 2}, {2}], [4.0, 1.5, 2.0])
    t, _ = reduce_set_cover(weighted)
    assert list(t.costs) == [4.0, 1.5, 2.0]


def test_merging_and_empty_subsets():
    # elements 0 and 1 share membership; subset 2 is empty
    sc = SetCoverInstance(3, [{0, 1}, {0, 1, 2}, set()])
    t, mapping = reduce_set_cover(sc)
    assert t.n == 3 and t.k == 2
    assert mapping.event_elements == {1: (0, 1), 2: (2,)}
    assert extract_cover(exact_owbq(t).witness, mapping) == {1}


def test_any_questionnaire_yields_a_cover():
    for seed in range(6):
        sc = generate_set_cover(4, 4, seed)
        t, mapping = reduce_set_cover(sc)
        for q in itertools.islice(enumerate_questionnaires(t), 300):
            assert sc.is_cover(extract_cover(q, mapping))


def test_weighted_optimum_matches_brute_force():
    for seed in range(8):
        sc = generate_set_cover(6, 5, seed, weighted=True)
        t, mapping = reduce_set_cover(sc)
        cover = extract_cover(exact_owbq(t).witness, mapping)
        assert sc.weight_of(cover) == pytest.approx(brute_min_cover(sc).value)


def test_fractional_weights_use_finer_resolution():
    assert weight_resolution([1.0, 2.0]) == 1.0
    assert weight_resolution([0.5, 0.75]) == pytest.approx(0.25)
    sc = SetCoverInstance(2, [{0}, {1}, {0, 1}], [0.5, 0.75, 1.3])
    t, mapping = reduce_set_cover(sc)
    cover = extract_cover(exact_owbq(t).witness, mapping)
    assert sc.weight_of(cover) == pytest.approx(brute_min_cover(sc).value)


def test_missing_y0_and_invalid_instances():
    _, mapping = reduce_set_cover(EXAMPLE)
    with pytest.raises(InconsistentQuestionnaireError):
        extract_cover(Node(0, Leaf(1), Leaf(2)), mapping)
    with pytest.raises(InfeasibleError):
        SetCoverInstance(3, [{0}, {1}])
    with pytest.raises(MalformedInstanceError):
        SetCoverInstance(2, [{0, 5}])
    with pytest.raises(MalformedInstanceError):
        SetCoverInstance(2, [{0, 1}], [0.0])


def test_identification_degree_examples():
    n = 5
    full = Partition(tuple((i,) for i in range(n)), (1 / n,) * n, (1 / n,) * n)
    assert identification_degree(full) == pytest.approx(1 / n)
    assert identification_degree(Partition(((0, 1, 2),), (1.0,), (1.0,))) == 1.0
    m = 2
    blocks = ((0,), (1,), (2, 3, 4))
    p = Partition(blocks, (0.2, 0.2, 0.6), (0.2, 0.2, 0.6))
    assert identification_degree(p) == pytest.approx(m / n**2 + (n - m) ** 2 / n**2)
    assert knapsack_degree(n, m) == pytest.approx(identification_degree(p))
    with pytest.raises(MalformedInstanceError):
        Partition(((0, 1), (1,)), (0.5, 0.5), (0.5, 0.5))


def test_reduce_knapsack_construction():
    ks = KnapsackInstance([2, 3, 4], 5)
    inst = reduce_knapsack(ks)
    assert (inst.table.n, inst.table.k, inst.budget) == (3, 3, 5.0)
    assert (inst.table.outcomes.sum(axis=1) == 1).all()
    assert list(inst.table.costs) == [2.0, 3.0, 4.0]
    assert inst.sizes == (1 / 3,) * 3


def test_ldq_budget_extremes():
    ks = KnapsackInstance([2, 3, 4, 1], 100)
    inst = reduce_knapsack(ks)
    sel = CompositeSelector.constant(QPF)
    assert ldq_build(sel, inst)[1] == pytest.approx(1 / 4)
    assert exact_ldq(inst).value == pytest.approx(1 / 4)
    zero = reduce_knapsack(KnapsackInstance([2, 3, 4, 1], 0))
    p, d = ldq_build(sel, zero)
    assert d == 1.0 and p.blocks == ((0, 1, 2, 3),)
    assert exact_ldq(zero).value == 1.0


def test_small_knapsack_example():
    ks = KnapsackInstance([2, 3, 4], 5)
    inst = reduce_knapsack(ks)
    res = exact_ldq(inst)
    assert res.value == pytest.approx(3 / 9)
    assert len(knapsack_packing(res.tree, inst)) == 2 == knapsack_dp(ks).value
    best = max(enumerate_check_subsets(ks), key=len)
    assert len(best) == 2


def test_single_item_knapsack():
    ks = KnapsackInstance([3.0], 5.0)
    inst = reduce_knapsack(ks)
    res = exact_ldq(inst)
    assert res.value == 1.0
    assert knapsack_packing(res.tree, inst, ks) == {0}
    assert knapsack_packing(Block((0,)), inst, KnapsackInstance([6.0], 5.0)) == frozenset()


def test_ldq_heuristics_bounded_by_exact():
    for seed in range(6):
        ks = generate_knapsack(6, seed)
        inst = reduce_knapsack(ks)
        opt = exact_ldq(inst).value
        tree, _, d = ldq_local_search(inst, LsConfig("mixed"))
        assert d == pytest.approx(identification_degree(partition_of(tree, inst)))
        assert opt - 1e-12 <= d <= 1.0
        _, _, dg = ldq_evolve(inst, GaParams(population_size=10, max_generations=10, seed=seed))
        assert opt - 1e-12 <= dg <= 1.0
        packed = knapsack_packing(tree, inst, ks)
        assert sum(ks.item_weights[i] for i in packed) <= ks.capacity + 1e-9


def test_value_encoding_is_normalized():
    ks = KnapsackInstance([1, 2], 2, [3, 1])
    inst = reduce_knapsack(ks, use_values=True)
    assert list(inst.table.probs) == pytest.approx([0.75, 0.25])


def test_knapsack_validation():
    with pytest.raises(MalformedInstanceError):
        KnapsackInstance([], 1)
    with pytest.raises(MalformedInstanceError):
        KnapsackInstance([0.0], 1)
    with pytest.raises(MalformedInstanceError):
        KnapsackInstance([1.0], -1)
    with pytest.raises(MalformedInstanceError):
        KnapsackInstance([1.0], 1, [1.0, 2.0])
