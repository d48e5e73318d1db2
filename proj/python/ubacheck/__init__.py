"""Probabilistic model checking of Markov chains against unambiguous Buchi automata."""

from ._core import (
    AmbiguityError,
    Dtmc,
    Nba,
    NumericError,
    ParseError,
    PreconditionError,
    ValidationError,
    almost_universal,
    generate,
    is_unambiguous,
    measure,
    measure_uniform,
    oracle,
    parse_dtmc,
    parse_hoa,
    uniform_chain,
)

__all__ = [
    "AmbiguityError",
    "Dtmc",
    "Nba",
    "NumericError",
    "ParseError",
    "PreconditionError",
    "ValidationError",
    "almost_universal",
    "generate",
    "is_unambiguous",
    "measure",
    "measure_uniform",
    "oracle",
    "parse_dtmc",
    "parse_hoa",
    "uniform_chain",
]
