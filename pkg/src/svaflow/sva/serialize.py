"""Versioned JSON form of assertion ASTs (``schema: 1``)."""

from __future__ import annotations

import json
from typing import Any

from .ast import (
    And,
    Arith,
    AssertionAst,
    BoolExpr,
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
)

SCHEMA = 1
_UNARY = {"not": Not, "rose": Rose, "fell": Fell, "stable": Stable}
_UNARY_NAMES = {cls: name for name, cls in _UNARY.items()}


def expr_to_json(e: BoolExpr) -> dict[str, Any]:
    if isinstance(e, Ident):
        out: dict[str, Any] = {"kind": "ident", "name": e.name}
        if e.index is not None:
            out["index"] = expr_to_json(e.index)
        return out
    if isinstance(e, IntLit):
        return {"kind": "int", "value": e.value}
    if isinstance(e, StrLit):
        return {"kind": "str", "text": e.text}
    if isinstance(e, (And, Or)):
        return {"kind": "and" if isinstance(e, And) else "or", "args": [expr_to_json(a) for a in e.args]}
    if isinstance(e, (Cmp, Arith)):
        return {"kind": "cmp" if isinstance(e, Cmp) else "arith", "op": e.op,
                "lhs": expr_to_json(e.lhs), "rhs": expr_to_json(e.rhs)}
    if isinstance(e, Past):
        return {"kind": "past", "arg": expr_to_json(e.arg), "depth": e.depth}
    return {"kind": _UNARY_NAMES[type(e)], "arg": expr_to_json(e.arg)}


def expr_from_json(d: dict[str, Any]) -> BoolExpr:
    kind = d["kind"]
    if kind == "ident":
        return Ident(d["name"], expr_from_json(d["index"]) if "index" in d else None)
    if kind == "int":
        return IntLit(int(d["value"]))
    if kind == "str":
        return StrLit(d["text"])
    if kind in ("and", "or"):
        return (And if kind == "and" else Or)(tuple(expr_from_json(a) for a in d["args"]))
    if kind in ("cmp", "arith"):
        return (Cmp if kind == "cmp" else Arith)(d["op"], expr_from_json(d["lhs"]), expr_from_json(d["rhs"]))
    if kind == "past":
        return Past(expr_from_json(d["arg"]), d.get("depth"))
    if kind in _UNARY:
        return _UNARY[kind](expr_from_json(d["arg"]))
    raise ValueError(f"unknown expression kind {kind!r}")


def _delay(d: DelayRange | None):
    return None if d is None else [d.lo, d.hi]


def _seq_to_json(s: SequenceExpr) -> dict[str, Any]:
    return {
        "lead": _delay(s.lead),
        "elements": [expr_to_json(e) for e in s.elements],
        "delays": [_delay(d) for d in s.delays],
    }


def _seq_from_json(d: dict[str, Any]) -> SequenceExpr:
    return SequenceExpr(
        tuple(expr_from_json(e) for e in d["elements"]),
        tuple(DelayRange(*x) for x in d["delays"]),
        DelayRange(*d["lead"]) if d.get("lead") else None,
    )


def assertion_to_json(ast: AssertionAst) -> dict[str, Any]:
    if isinstance(ast.body, Implication):
        body = {
            "kind": "implication",
            "operator": ast.body.operator,
            "antecedent": _seq_to_json(ast.body.antecedent),
            "consequent": _seq_to_json(ast.body.consequent),
        }
    else:
        body = {"kind": "sequence", "sequence": _seq_to_json(ast.body.seq)}
    g = ast.generate
    return {
        "schema": SCHEMA,
        "name": ast.name,
        "clock": ast.clock,
        "disable": expr_to_json(ast.disable) if ast.disable is not None else None,
        "body": body,
        "origin": ast.origin,
        "generate": None if g is None else
        {"loop_var": g.loop_var, "lower": g.lower, "upper": g.upper, "label": g.label},
    }


def assertion_from_json(d: dict[str, Any]) -> AssertionAst:
    if d.get("schema") != SCHEMA:
        raise ValueError(f"unsupported assertion schema {d.get('schema')!r}")
    b = d["body"]
    if b["kind"] == "implication":
        body = Implication(_seq_from_json(b["antecedent"]), b["operator"] == "|->", _seq_from_json(b["consequent"]))
    else:
        body = SeqProp(_seq_from_json(b["sequence"]))
    g = d.get("generate")
    return AssertionAst(
        name=d["name"],
        clock=d["clock"],
        body=body,
        disable=expr_from_json(d["disable"]) if d.get("disable") else None,
        origin=d.get("origin", "llm"),
        generate=None if g is None else GenerateBinding(g["loop_var"], g["lower"], g["upper"], g.get("label")),
    )


def dump_assertion_set(asts: list[AssertionAst], indent: int | None = 2) -> str:
    return json.dumps({"schema": SCHEMA, "assertions": [assertion_to_json(a) for a in asts]}, indent=indent)


def load_assertion_set(text: str) -> list[AssertionAst]:
    data = json.loads(text)
    if data.get("schema") != SCHEMA:
        raise ValueError(f"unsupported assertion-set schema {data.get('schema')!r}")
    return [assertion_from_json(a) for a in data["assertions"]]
