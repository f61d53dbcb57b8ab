"""Binary questionnaire optimization with composite selection functions.

Local search and a genetic algorithm search over composite root-question
selection functions; set cover and 0-1 knapsack are solved through their
reductions to questionnaire problems.
"""
from .errors import (
    CapExceededError,
    IncompleteTableError,
    InconsistentQuestionnaireError,
    InfeasibleError,
    InvariantError,
    MalformedInstanceError,
    QuestoptError,
    SenselessSplitError,
    UndefinedValueError,
)
from .genetic import GaParams, Genotype, crossover, decode, evolve, mutate, selection_weight
from .local_search import LsConfig, local_search
from .model import (
    CompletenessReport,
    Leaf,
    Node,
    ProblemTable,
    compactness,
    cost_entropy,
    entropy,
    example_questionnaire,
    example_table,
    questionnaire_cost,
    split_on,
    validate_table,
)
from .oracles import brute_min_cover, exact_ldq, exact_owbq, knapsack_dp
from .reductions import (
    KnapsackInstance,
    LdqInstance,
    Partition,
    SetCoverInstance,
    extract_cover,
    identification_degree,
    ldq_build,
    reduce_knapsack,
    reduce_set_cover,
)
from .rqsf import (
    GREEDY,
    QPF,
    CompositeSelector,
    IntervalSystem,
    Rqsf,
    apply_elementary,
    build_questionnaire,
    delta_entropy,
    dumb,
    dynamic_intervals,
    locate_interval,
    rebuild_intervals_preserving,
)

__all__ = [
    "apply_elementary",
    "brute_min_cover",
    "build_questionnaire",
    "CapExceededError",
    "compactness",
    "CompletenessReport",
    "CompositeSelector",
    "cost_entropy",
    "crossover",
    "decode",
    "delta_entropy",
    "dumb",
    "dynamic_intervals",
    "entropy",
    "evolve",
    "exact_ldq",
    "exact_owbq",
    "example_questionnaire",
    "example_table",
    "extract_cover",
    "GaParams",
    "Genotype",
    "GREEDY",
    "identification_degree",
    "IncompleteTableError",
    "InconsistentQuestionnaireError",
    "InfeasibleError",
    "IntervalSystem",
    "InvariantError",
    "knapsack_dp",
    "KnapsackInstance",
    "ldq_build",
    "LdqInstance",
    "Leaf",
    "local_search",
    "locate_interval",
    "LsConfig",
    "MalformedInstanceError",
    "mutate",
    "Node",
    "Partition",
    "ProblemTable",
    "QPF",
    "questionnaire_cost",
    "QuestoptError",
    "rebuild_intervals_preserving",
    "reduce_knapsack",
    "reduce_set_cover",
    "Rqsf",
    "selection_weight",
    "SenselessSplitError",
    "SetCoverInstance",
    "split_on",
    "UndefinedValueError",
    "validate_table",
]

__version__ = "0.1.0"
