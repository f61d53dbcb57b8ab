"""
Knapsack as a limited-depth questionnaire
=========================================

Each item becomes a single-event check costing the item's weight, and no
branch may spend more than the capacity.  Identifying more events lowers
the degree of identification D.
"""

import questopt as qo
from questopt.bench import generate_knapsack
from questopt.reductions import knapsack_degree, knapsack_packing, ldq_local_search

ks = qo.KnapsackInstance([2, 3, 4], 5)
inst = qo.reduce_knapsack(ks)
res = qo.exact_ldq(inst)
print("blocks:", res.witness.blocks, "D =", round(res.value, 6))
print("packed:", sorted(knapsack_packing(res.tree, inst, ks)))
print("dp count:", qo.knapsack_dp(ks).value)

# D as a function of the number of checked items
n = 6
print([round(knapsack_degree(n, m), 4) for m in range(n + 1)])

ks = generate_knapsack(9, seed=4)
inst = qo.reduce_knapsack(ks)
exact = qo.exact_ldq(inst)
tree, _, d = ldq_local_search(inst, qo.LsConfig("mixed"))
print(f"capacity {ks.capacity}, weights {ks.item_weights}")
print(f"exact D {exact.value:.4f}, local search D {d:.4f}")
print("local search packs", sorted(knapsack_packing(tree, inst, ks)))
