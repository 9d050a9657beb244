"""SVA subset: AST, tolerant parser, printer, checks and rewrites."""

from .ast import (
    And,
    Arith,
    AssertionAst,
    Cmp,
    DelayRange,
    Fell,
    GenerateBinding,
    Ident,
    Implication,
    IntLit,
    Not,
    Or,
    Past,
    Rose,
    SeqProp,
    SequenceExpr,
    Stable,
    StrLit,
    referenced_signals,
)
from .parser import parse_assertions
from .printer import pretty_print, print_expr, print_property_spec
from .semantics import check_semantics
from .serialize import assertion_from_json, assertion_to_json, dump_assertion_set, load_assertion_set
from .transform import UnboundParameter, expand_generate, normalize

__all__ = [
    "And", "Arith", "AssertionAst", "Cmp", "DelayRange", "Fell", "GenerateBinding", "Ident",
    "Implication", "IntLit", "Not", "Or", "Past", "Rose", "SeqProp", "SequenceExpr", "Stable",
    "StrLit", "UnboundParameter", "assertion_from_json", "assertion_to_json", "check_semantics",
    "dump_assertion_set", "expand_generate", "load_assertion_set", "normalize", "parse_assertions",
    "pretty_print", "print_expr", "print_property_spec", "referenced_signals",
]
