"""Downward closures of regular, blind-counter and context-free languages
under the subword order: ideals, closure automata and inclusion checks."""

from .automata import Alphabet, Dfa, Nfa
from .blind import BlindAutomaton, dc_nfa
from .decision import Verdict, cross_validate, decide_equivalence, decide_inclusion, find_word_witness
from .errors import AlphabetMismatchError, ParseError, ResourceError, SubseqError, UnsupportedModelError
from .formats import load_model, parse_model, serialize
from .grammar import Cfg, CnfGrammar
from .ideals import Ideal, IdealExpr, OptionalLetter, StarSet, normalize, parse_seq

__all__ = [
    "Alphabet",
    "AlphabetMismatchError",
    "BlindAutomaton",
    "Cfg",
    "CnfGrammar",
    "Dfa",
    "Ideal",
    "IdealExpr",
    "Nfa",
    "OptionalLetter",
    "ParseError",
    "ResourceError",
    "StarSet",
    "SubseqError",
    "UnsupportedModelError",
    "Verdict",
    "cross_validate",
    "dc_nfa",
    "decide_equivalence",
    "decide_inclusion",
    "find_word_witness",
    "load_model",
    "normalize",
    "parse_model",
    "parse_seq",
    "serialize",
]
