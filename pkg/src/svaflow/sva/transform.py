"""AST rewrites: generate-loop expansion and canonical normalization."""

from __future__ import annotations

from dataclasses import replace
from typing import Callable, Mapping

from .ast import (
    And,
    Arith,
    AssertionAst,
    BoolExpr,
    Cmp,
    DelayRange,
    Fell,
    Ident,
    Implication,
    IntLit,
    Not,
    Or,
    Past,
    PropertyExpr,
    Rose,
    SeqProp,
    SequenceExpr,
    Stable,
    StrLit,
)
from .printer import print_expr


class UnboundParameter(KeyError):
    def __init__(self, name: str, assertion: str):
        super().__init__(name)
        self.name = name
        self.assertion = assertion

    def __str__(self) -> str:
        return f"generate bound '{self.name}' of '{self.assertion}' is not a known parameter"


def map_expr(expr: BoolExpr, fn: Callable[[BoolExpr], BoolExpr]) -> BoolExpr:
    """Rebuild ``expr`` bottom-up, applying ``fn`` to every node after its children."""
    if isinstance(expr, Ident):
        if expr.index is not None:
            expr = replace(expr, index=map_expr(expr.index, fn))
    elif isinstance(expr, (IntLit, StrLit)):
        pass
    elif isinstance(expr, And):
        expr = And(tuple(map_expr(a, fn) for a in expr.args))
    elif isinstance(expr, Or):
        expr = Or(tuple(map_expr(a, fn) for a in expr.args))
    elif isinstance(expr, (Cmp, Arith)):
        expr = type(expr)(expr.op, map_expr(expr.lhs, fn), map_expr(expr.rhs, fn))
    elif isinstance(expr, Past):
        expr = Past(map_expr(expr.arg, fn), expr.depth)
    elif isinstance(expr, (Not, Rose, Fell, Stable)):
        expr = type(expr)(map_expr(expr.arg, fn))
    else:
        raise TypeError(f"not a boolean expression: {expr!r}")
    return fn(expr)


def _map_seq(seq: SequenceExpr, fn) -> SequenceExpr:
    return replace(seq, elements=tuple(fn(e) for e in seq.elements))


def map_assertion(ast: AssertionAst, fn: Callable[[BoolExpr], BoolExpr]) -> AssertionAst:
    """Apply an expression rewrite to every element and the disable condition."""
    body: PropertyExpr
    if isinstance(ast.body, Implication):
        body = Implication(_map_seq(ast.body.antecedent, fn), ast.body.overlapping, _map_seq(ast.body.consequent, fn))
    else:
        body = SeqProp(_map_seq(ast.body.seq, fn))
    disable = fn(ast.disable) if ast.disable is not None else None
    return replace(ast, body=body, disable=disable)


def expand_generate(ast: AssertionAst, parameters: Mapping[str, int] | None = None) -> list[AssertionAst]:
    """Instantiate a generate-for assertion once per loop index.

    Each copy has the loop variable replaced by the literal index and the name
    suffixed with ``_<index>``. Assertions without a loop come back unchanged
    in a one-element list.
    """
    g = ast.generate
    if g is None:
        return [ast]
    upper = g.upper
    if isinstance(upper, str):
        if parameters is None or upper not in parameters:
            raise UnboundParameter(upper, ast.name)
        upper = int(parameters[upper])
    out = []
    for idx in range(g.lower, upper):

        def subst(node: BoolExpr, idx=idx) -> BoolExpr:
            if isinstance(node, Ident) and node.index is None and node.name == g.loop_var:
                return IntLit(idx)
            return node

        inst = map_assertion(ast, lambda e: map_expr(e, subst))
        out.append(replace(inst, name=f"{ast.name}_{idx}", generate=None))
    return out


# --------------------------------------------------------------------------
# normalization

_COMMUTATIVE_CMP = ("==", "!=", "===", "!==")
_ONE = DelayRange(1, 1)
_BOOLEAN_NODES = (Not, And, Or, Cmp, Rose, Fell, Stable)


def _norm(expr: BoolExpr, boolean_ctx: bool) -> BoolExpr:
    """Normalize one expression. ``boolean_ctx`` is true where only truthiness is observed."""
    if isinstance(expr, Ident):
        return expr if expr.index is None else replace(expr, index=_norm(expr.index, False))
    if isinstance(expr, (IntLit, StrLit)):
        return expr
    if isinstance(expr, Not):
        inner = _norm(expr.arg, True)
        # !!e == e only where e is already 0/1-valued or only its truthiness matters
        if isinstance(inner, Not) and (boolean_ctx or isinstance(inner.arg, _BOOLEAN_NODES)):
            return inner.arg
        return Not(inner)
    if isinstance(expr, (And, Or)):
        cls = type(expr)
        flat: list[BoolExpr] = []
        for a in expr.args:
            a = _norm(a, True)
            if isinstance(a, cls):
                flat.extend(a.args)
            else:
                flat.append(a)
        return cls(tuple(sorted(flat, key=print_expr)))
    if isinstance(expr, Cmp):
        lhs, rhs = _norm(expr.lhs, False), _norm(expr.rhs, False)
        if expr.op in _COMMUTATIVE_CMP and print_expr(rhs) < print_expr(lhs):
            lhs, rhs = rhs, lhs
        return Cmp(expr.op, lhs, rhs)
    if isinstance(expr, Arith):
        return Arith(expr.op, _norm(expr.lhs, False), _norm(expr.rhs, False))
    if isinstance(expr, Past):
        return Past(_norm(expr.arg, boolean_ctx), expr.depth or 1)
    if isinstance(expr, (Rose, Fell, Stable)):
        return type(expr)(_norm(expr.arg, False))
    raise TypeError(f"not a boolean expression: {expr!r}")


def _norm_seq(seq: SequenceExpr) -> SequenceExpr:
    return replace(seq, elements=tuple(_norm(e, True) for e in seq.elements))


def normalize(ast: AssertionAst) -> AssertionAst:
    """Canonical form used for structural comparison.

    ``a |=> c`` becomes ``a |-> ##1 c``; operands of ``&&``/``||`` are
    flattened and, like the sides of equality operators, sorted by their
    printed form; double negation is removed; ``$past`` gets an explicit
    depth. ``disable iff`` is never folded into the antecedent or back.
    """
    body = ast.body
    if isinstance(body, Implication):
        ante = _norm_seq(body.antecedent)
        cons = _norm_seq(body.consequent)
        if not body.overlapping:
            cons = replace(cons, lead=cons.lead.shifted(1) if cons.lead else _ONE)
        body = Implication(ante, True, cons)
    else:
        body = SeqProp(_norm_seq(body.seq))
    disable = _norm(ast.disable, True) if ast.disable is not None else None
    return replace(ast, body=body, disable=disable)
