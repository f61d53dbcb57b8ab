"""Acceptance criteria, one test each; results are summarized after the run."""
import functools
import time

import numpy as np

from questopt import formats
from questopt.bench import generate_instance, generate_knapsack, generate_set_cover, solve
from questopt.genetic import GaParams, evolve
from questopt.local_search import LsConfig, improves, local_search
from questopt.model import (
    A3_COSTS,
    A3_PROBS,
    example_questionnaire,
    example_table,
    questionnaire_cost,
    split_on,
)
from questopt.oracles import brute_min_cover, exact_ldq, exact_owbq, knapsack_dp, naive_owbq
from questopt.reductions import (
    extract_cover,
    knapsack_degree,
    knapsack_packing,
    reduce_knapsack,
    reduce_set_cover,
)
from questopt.rqsf import QPF, apply_elementary, build_elementary, build_questionnaire

from conftest import criterion, small_instances


def _hand_path_sum():
    c1, c2, c3, c4, c5 = A3_COSTS
    p = A3_PROBS
    return (
        (c1 + c2 + c3 + c4) * (p[0] + p[1] + p[2] + p[3])
        + (c1 + c2) * p[4]
        + (c1 + c3 + c4 + c5) * (p[5] + p[6])
        + (c1 + c3 + c4) * p[7]
        + (c1 + c3) * p[8]
    )


def test_c1_cost_of_worked_questionnaire():
    with criterion(1, "cost of the worked questionnaire equals the hand path sum"):
        start = time.perf_counter()
        cost = questionnaire_cost(example_questionnaire(), example_table())
        assert time.perf_counter() - start < 1e-3
        assert abs(cost - _hand_path_sum()) <= 1e-9


def test_c2_split_reproduces_outcome_sets():
    with criterion(2, "split on t1 reproduces the t1 outcome sets"):
        t0, t1 = split_on(example_table(), 0)
        assert {e + 1 for e in t0.event_labels} == {1, 2, 3, 4, 5}
        assert {e + 1 for e in t1.event_labels} == {6, 7, 8, 9}


def test_c3_qpf_picks_t1():
    with criterion(3, "Qpf picks t1 on the worked example, matching brute-force scoring"):
        t = example_table()
        start = time.perf_counter()
        choice = apply_elementary(QPF, t)
        assert time.perf_counter() - start < 1e-3
        scores = []
        for c, row in zip(A3_COSTS, t.outcomes):
            p1 = sum(p for p, b in zip(A3_PROBS, row) if b)
            scores.append(c / (1 - p1) + c / p1)
        assert choice == 0 == int(np.argmin(scores))


@functools.lru_cache(maxsize=None)
def _ls_runs():
    """Greedy and mixed LS on 50 instances, checking each accepted rebuild."""
    instances = small_instances(50, (6, 12), (4, 10), seed=2024)
    rebuilds = {"checked": 0, "mismatched": 0}
    results = []
    for t in instances:

        def check(_it, q, sel, t=t):
            rebuilds["checked"] += 1
            if build_questionnaire(sel, t) != q:
                rebuilds["mismatched"] += 1

        qpf = questionnaire_cost(build_elementary(QPF, t), t)
        greedy = local_search(t, LsConfig("greedy"), on_step=check)
        mixed = local_search(t, LsConfig("mixed"), on_step=check)
        results.append((qpf, greedy, mixed))
    return results, rebuilds


def test_c4_local_search_monotone_and_dominant():
    with criterion(4, "LS steps strictly decrease cost; greedy/mixed LS <= QPF on 50 instances", 10.0):
        results, _ = _ls_runs()
        assert len(results) == 50
        for qpf, greedy, mixed in results:
            for res in (greedy, mixed):
                costs = [r.cost for r in res.trace]
                assert all(improves(b, a) for a, b in zip(costs, costs[1:]))
                assert res.cost <= qpf + 1e-9 * max(1.0, qpf)


def test_c5_oracle_sandwich():
    with criterion(5, "exact <= every heuristic on 30 instances; exact == naive for n <= 5", 60.0):
        instances = small_instances(30, (3, 8), (3, 7), seed=5005)
        compared = 0
        for i, t in enumerate(instances):
            opt = exact_owbq(t).value
            for method in ("qpf", "ls-dumb", "ls-greedy", "ls-mixed", "ga"):
                _, cost = solve(t, method, seed=i)
                assert opt <= cost + 1e-9
            if t.n <= 5:
                assert abs(naive_owbq(t).value - opt) <= 1e-9
                compared += 1
        assert compared > 0


def test_c6_rebuild_preserves_questionnaire():
    with criterion(6, "every accepted LS step rebuilds the identical questionnaire"):
        _, rebuilds = _ls_runs()
        assert rebuilds["checked"] > 0
        assert rebuilds["mismatched"] == 0


def test_c7_ga_contract():
    with criterion(7, "GA is deterministic, best cost never rises, never beats the optimum", 30.0):
        a3 = example_table()
        params = GaParams(seed=42)
        first, second = evolve(a3, params), evolve(a3, params)
        assert first.log == second.log and first.genotype == second.genotype
        for t in [a3] + small_instances(8, (4, 8), (3, 7), seed=77):
            res = evolve(t, params)
            best = [r.best_cost for r in res.log]
            assert all(b <= a for a, b in zip(best, best[1:]))
            assert res.cost >= exact_owbq(t).value - 1e-9


def test_c8_set_cover_reduction():
    with criterion(8, "exact questionnaire yields a minimum cover on 20 instances", 30.0):
        rng = np.random.default_rng(808)
        for i in range(20):
            u = int(rng.integers(2, 9))
            m = int(rng.integers(1, min(6, 2**u - 1) + 1))
            sc = generate_set_cover(u, m, int(rng.integers(2**31)), weighted=i % 2 == 1)
            t, mapping = reduce_set_cover(sc)
            n, k = t.n - 1, t.k
            assert mapping.epsilon * n * (k + 1) < 1
            assert t.probs[0] > 0 and abs(t.probs.sum() - 1.0) <= 1e-12
            cover = extract_cover(exact_owbq(t).witness, mapping)
            assert sc.is_cover(cover)
            assert abs(sc.weight_of(cover) - brute_min_cover(sc).value) <= 1e-9


def test_c9_knapsack_reduction():
    with criterion(9, "exact LDQ packs the DP optimum count with the predicted degree", 30.0):
        rng = np.random.default_rng(909)
        for _ in range(20):
            n = int(rng.integers(2, 11))
            ks = generate_knapsack(n, int(rng.integers(2**31)))
            inst = reduce_knapsack(ks)
            res = exact_ldq(inst)
            m = int(knapsack_dp(ks).value)
            packed = knapsack_packing(res.tree, inst, ks)
            assert len(packed) == m
            assert sum(ks.item_weights[i] for i in packed) <= ks.capacity + 1e-9
            assert abs(res.value - knapsack_degree(n, m)) <= 1e-12


def test_c10_format_round_trips():
    with criterion(10, "parse(serialize(x)) == x on 100 instances across three formats"):
        rng = np.random.default_rng(1010)
        objs = []
        for i in range(100):
            seed = int(rng.integers(2**31))
            if i % 3 == 0:
                n = int(rng.integers(2, 13))
                objs.append(generate_instance(n, int(rng.integers(4, 9)), seed, prob_mode="random"))
            elif i % 3 == 1:
                u = int(rng.integers(1, 8))
                m = int(rng.integers(1, min(7, 2**u - 1) + 1))
                objs.append(generate_set_cover(u, m, seed, weighted=i % 2 == 0))
            else:
                objs.append(generate_knapsack(int(rng.integers(1, 12)), seed, with_values=i % 2 == 0))
        assert len(objs) == 100
        for obj in objs:
            assert formats.loads(formats.dumps(obj)) == obj
