"""Multi-index modal logics with intersection and closure-of-union modalities.

Parsing, Kripke semantics, Hilbert proof checking, finite closures, standard
model construction with audits, and satisfiability/validity deciders.
"""

from .syntax import Formula, ParseError, parse, render
from .semantics import FrameClass, KripkeModel, satisfies
from .proof import SystemId, check_proof, parse_script
from .closure import Signature, closure
from .construction import build_standard_model, enumerate_atoms
from .solver import brute_force_sat, closure_sat, decide_valid

__all__ = [
    "Formula",
    "ParseError",
    "parse",
    "render",
    "FrameClass",
    "KripkeModel",
    "satisfies",
    "SystemId",
    "check_proof",
    "parse_script",
    "Signature",
    "closure",
    "build_standard_model",
    "enumerate_atoms",
    "brute_force_sat",
    "closure_sat",
    "decide_valid",
]
