"""
The nine-event worked example
=============================

Build the example table, cost the hand-made questionnaire, and compare it
with the greedy Qpf questionnaire and the exact optimum.
"""

import questopt as qo

t = qo.example_table()
print(t)
print("completeness:", qo.validate_table(t))

# hand-built tree, costed by summing path costs weighted by probability
hand = qo.example_questionnaire()
print("hand-built questionnaire cost:", round(qo.questionnaire_cost(hand, t), 6))

# splitting on the first question keeps labels, drops the senseless rows
t0, t1 = qo.split_on(t, 0)
print("zero branch events:", t0.event_labels, "questions:", t0.question_labels)
print("one branch events: ", t1.event_labels, "questions:", t1.question_labels)

# each elementary function picks a root question
for f in qo.GREEDY:
    print(f"{f.token:>4} picks question", qo.apply_elementary(f, t))

greedy = qo.build_questionnaire(qo.CompositeSelector.constant(qo.QPF), t)
print("Qpf questionnaire cost:", round(qo.questionnaire_cost(greedy, t), 6))
print("exact optimum:", round(qo.exact_owbq(t).value, 6))
