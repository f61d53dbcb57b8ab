"""
Genetic search over function assignments
========================================

A genotype assigns one selection function to each equal-width interval of
the characteristic function's range.
"""

import numpy as np

import questopt as qo
from questopt.bench import generate_instance

t = qo.example_table()
res = qo.evolve(t, qo.GaParams(seed=1))
print("best cost:", round(res.cost, 6), "after", len(res.log) - 1, "generations")
print("genotype:", res.genotype.dumps().strip())
for row in res.log[::5]:
    print(f"gen {row.generation:3d}  best {row.best_cost:.4f}  mean {row.mean_cost:.4f}")

# the operators on their own
a = qo.Genotype((qo.QPF,) * 6)
b = qo.Genotype((qo.dumb(0),) * 6)
print([g.token for g in qo.crossover(a, b, 2)[0].genes])
rng = np.random.default_rng(0)
print([g.token for g in qo.mutate(a, rng, qo.GREEDY, k=3).genes])
print(qo.selection_weight([10.0, 12.0, 15.0]))

# seeds change the path, not the contract
t = generate_instance(10, 7, seed=11, prob_mode="random")
opt = qo.exact_owbq(t).value
for seed in range(3):
    r = qo.evolve(t, qo.GaParams(seed=seed, population_size=20, max_generations=40))
    print(f"seed {seed}: {r.cost:.4f} (optimum {opt:.4f})")
