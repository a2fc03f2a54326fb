"""Model checking, proof checking and soundness fuzzing for the logic of
distributed knowledge and coalition power with intelligence."""

from .game import GameModel, atlantic, coalition_indist, load_model, successors, validate_model
from .parser import parse, to_text
from .proof import Schema, check_proof, is_tautology, load_script, match_axiom
from .semantics import check_intel_power, check_knowledge, naive_check, satisfies, valid_in_model
from .syntax import Atom, Implies, IntelPower, Knows, Not, agents_of, mk_intel_power, subformulas

__all__ = [
    "Atom", "GameModel", "Implies", "IntelPower", "Knows", "Not", "Schema",
    "agents_of", "atlantic", "check_intel_power", "check_knowledge", "check_proof",
    "coalition_indist", "is_tautology", "load_model", "load_script", "match_axiom",
    "mk_intel_power", "naive_check", "parse", "satisfies", "subformulas",
    "successors", "to_text", "valid_in_model", "validate_model",
]
