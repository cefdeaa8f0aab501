"""Containment checking for behavior models.

A high-level behavior model compiles into temporal properties; its
low-level counterpart compiles into an SMV description and an equivalent
in-memory transition system; the checker decides every property and
explains violations with lasso counterexamples.
"""

from .checker import (
    Lasso,
    Verdict,
    check,
    check_all,
    evaluate_on_lasso,
    oracle_check,
    render_report,
)
from .ingest import IngestError, ParseError, SourceSpan, load_model, parse_dsl, parse_json, print_dsl
from .ltl import (
    GeneratedProperty,
    GenerationError,
    Primitive,
    generate_properties,
    parse_ltl,
    render_formula,
    render_ltlspec,
)
from .model import (
    ActivityModel,
    Edge,
    Node,
    NodeKind,
    Violation,
    is_acyclic,
    predecessors,
    successors,
    validate,
)
from .semantics import (
    StateCapExceeded,
    TransitionSystem,
    build_system,
    reachable_states,
    simulate,
)
from .smv import AtomMismatchError, SmvModule, bundle_check_file, generate_smv, parse_smv, render_smv

__version__ = "0.1.0"

__all__ = [
    "ActivityModel",
    "AtomMismatchError",
    "Edge",
    "GeneratedProperty",
    "GenerationError",
    "IngestError",
    "Lasso",
    "Node",
    "NodeKind",
    "ParseError",
    "Primitive",
    "SmvModule",
    "SourceSpan",
    "StateCapExceeded",
    "TransitionSystem",
    "Verdict",
    "Violation",
    "build_system",
    "bundle_check_file",
    "check",
    "check_all",
    "evaluate_on_lasso",
    "generate_properties",
    "generate_smv",
    "is_acyclic",
    "load_model",
    "oracle_check",
    "parse_dsl",
    "parse_json",
    "parse_ltl",
    "parse_smv",
    "predecessors",
    "print_dsl",
    "reachable_states",
    "render_formula",
    "render_ltlspec",
    "render_report",
    "render_smv",
    "simulate",
    "successors",
    "validate",
]
