"""
Set cover as a questionnaire
============================

Add an all-zero event y0 with almost all the probability.  The cheapest
questionnaire must isolate y0 with as few questions as possible, and the
questions on its path form a minimum cover.
"""

import questopt as qo
from questopt import formats

sc = qo.SetCoverInstance(3, [{0, 1}, {1, 2}, {2}])
t, mapping = qo.reduce_set_cover(sc)
print(formats.dumps_table(t))
print("epsilon:", mapping.epsilon)

q = qo.exact_owbq(t).witness
print("cover from the exact questionnaire:", sorted(qo.extract_cover(q, mapping)))
print("brute force:", qo.brute_min_cover(sc).value)

# any questionnaire gives a cover, heuristics included
ls = qo.local_search(t, qo.LsConfig("mixed", char_fn="compactness"))
print("cover from local search:", sorted(qo.extract_cover(ls.questionnaire, mapping)))

# weights become question costs
weighted = qo.SetCoverInstance(4, [{0, 1, 2, 3}, {0, 1}, {2, 3}], [5.0, 2.0, 2.0])
t, mapping = qo.reduce_set_cover(weighted)
cover = qo.extract_cover(qo.exact_owbq(t).witness, mapping)
print("weighted cover:", sorted(cover), "weight", weighted.weight_of(cover))
