"""Exact probabilistic inference on binary state vectors.

Sets of Boolean states are stored as lists of cubes (rows over ``0``,
``1`` and ``-``); weighted sums of such sets give distributions whose
partition function, marginals and conditionals are computed exactly.
"""

from .algebra import (
    BinaryStateVector,
    Row,
    Trit,
    cardinality,
    complement,
    expand,
    free,
    merge_rows,
    reduce_rows,
    support,
    vector_difference,
    vector_product,
    vector_union,
)
from .distribution import (
    Distribution,
    Factor,
    PartitionValue,
    QueryResult,
    WeightedComponent,
    add,
    conditional_probability,
    marginalize,
    orthogonalize,
    partition,
    project,
)
from .errors import (
    InconsistentEvidenceError,
    InconsistentModelError,
    ModelError,
    ResourceLimitError,
    StateAlgebraError,
    UsageError,
)
from .factorization import (
    FactorizationPlan,
    InteractionGraph,
    build_graph,
    find_separator,
    markov_blanket_query,
    query,
    separator_query,
    split_components,
)
from .rules import DETERMINISTIC, Rule, RuleSystem, check_consistency, compile_system, load_model, parse_model

__version__ = "0.1.0"

__all__ = [
    "add",
    "BinaryStateVector",
    "build_graph",
    "cardinality",
    "check_consistency",
    "compile_system",
    "complement",
    "conditional_probability",
    "DETERMINISTIC",
    "Distribution",
    "expand",
    "Factor",
    "FactorizationPlan",
    "find_separator",
    "free",
    "InconsistentEvidenceError",
    "InconsistentModelError",
    "InteractionGraph",
    "load_model",
    "marginalize",
    "markov_blanket_query",
    "merge_rows",
    "ModelError",
    "orthogonalize",
    "parse_model",
    "partition",
    "PartitionValue",
    "project",
    "query",
    "QueryResult",
    "reduce_rows",
    "ResourceLimitError",
    "Row",
    "Rule",
    "RuleSystem",
    "separator_query",
    "split_components",
    "StateAlgebraError",
    "support",
    "Trit",
    "UsageError",
    "vector_difference",
    "vector_product",
    "vector_union",
    "WeightedComponent",
]
