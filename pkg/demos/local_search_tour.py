"""
Local search over composite selectors
=====================================

Start from all-Qpf, move one interval at a time to another function, and
keep the best strictly improving neighbour until none is left.
"""

import questopt as qo
from questopt.bench import generate_instance
from questopt.local_search import trace_csv

t = qo.example_table()
res = qo.local_search(t, qo.LsConfig("mixed"))
print(trace_csv(res.trace))
print("final selector:")
print(res.selector.dumps())

# one accepted step at a time
def show(iteration, q, sel):
    print(f"step {iteration}: {len(sel.intervals)} intervals, assignment {[f.token for f in sel.assignment]}")

qo.local_search(t, qo.LsConfig("mixed"), on_step=show)

# the three function families on a larger random table
t = generate_instance(12, 8, seed=3, prob_mode="random")
print("exact:", round(qo.exact_owbq(t).value, 4))
for family in ("dumb", "greedy", "mixed"):
    r = qo.local_search(t, qo.LsConfig(family))
    print(f"{family:>6}: cost {r.cost:.4f} after {r.iterations} iterations, {r.evaluations} neighbours")
