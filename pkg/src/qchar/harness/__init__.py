from .evaluator import Cache, CaseResult, Evaluator, evaluate_case
from .grammar import (
    ArityMismatch,
    Case,
    CorpusError,
    ParseError,
    UnknownBuilder,
    parse_corpus,
    parse_expr,
    pretty,
    pretty_case,
    pretty_corpus,
)

__all__ = [
    "ArityMismatch",
    "Cache",
    "Case",
    "CaseResult",
    "CorpusError",
    "Evaluator",
    "ParseError",
    "UnknownBuilder",
    "evaluate_case",
    "parse_corpus",
    "parse_expr",
    "pretty",
    "pretty_case",
    "pretty_corpus",
]
