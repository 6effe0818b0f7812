"""A miniKanren-style relational engine with ``noto`` under stable model semantics."""

from .config import SessionConfig
from .depgraph import Classification, build_graph, classify
from .engine import QueryOutcome, run, run_partial
from .errors import (
    BudgetExhausted,
    DefinitionError,
    FlounderingError,
    GroundingError,
    ParseError,
    StableRelError,
    TooLargeError,
    UndefinedRelationError,
)
from .grounder import ground
from .program import Program, define_relation, has_negation, relation
from .session import Session, report
from .sexpr import parse
from .stable import enumerate_stable_models, find_stable_model, is_stable

__all__ = [
    "BudgetExhausted",
    "Classification",
    "DefinitionError",
    "FlounderingError",
    "GroundingError",
    "ParseError",
    "Program",
    "QueryOutcome",
    "Session",
    "SessionConfig",
    "StableRelError",
    "TooLargeError",
    "UndefinedRelationError",
    "build_graph",
    "classify",
    "define_relation",
    "enumerate_stable_models",
    "find_stable_model",
    "ground",
    "has_negation",
    "is_stable",
    "parse",
    "relation",
    "report",
    "run",
    "run_partial",
]
