from __future__ import annotations

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

# binding strength used to decide where parentheses are required
_PREC = {Or: 30, And: 40, Cmp: 50, Arith: 70, Not: 80}
_REL_OPS = ("<", "<=", ">", ">=")


def _prec(expr: BoolExpr) -> int:
    if isinstance(expr, Cmp):
        return 60 if expr.op in _REL_OPS else 50
    return _PREC.get(type(expr), 100)


def _wrap(expr: BoolExpr, text: str, need: bool) -> str:
    return f"({text})" if need else text


def print_expr(expr: BoolExpr) -> str:
    if isinstance(expr, Ident):
        return expr.name if expr.index is None else f"{expr.name}[{print_expr(expr.index)}]"
    if isinstance(expr, IntLit):
        return str(expr.value)
    if isinstance(expr, StrLit):
        return '"' + expr.text.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(expr, Not):
        inner = print_expr(expr.arg)
        return "!" + _wrap(expr.arg, inner, _prec(expr.arg) < 100 or inner.startswith("-"))
    if isinstance(expr, (And, Or)):
        op = " && " if isinstance(expr, And) else " || "
        mine = _prec(expr)
        # same-operator children are parenthesised so nesting survives a reparse
        return op.join(_wrap(a, print_expr(a), _prec(a) <= mine) for a in expr.args)
    if isinstance(expr, (Cmp, Arith)):
        mine = _prec(expr)
        lhs = _wrap(expr.lhs, print_expr(expr.lhs), _prec(expr.lhs) < mine)
        rhs = _wrap(expr.rhs, print_expr(expr.rhs), _prec(expr.rhs) <= mine or _negative_lit(expr.rhs))
        return f"{lhs} {expr.op} {rhs}"
    if isinstance(expr, Past):
        if expr.depth is None:
            return f"$past({print_expr(expr.arg)})"
        return f"$past({print_expr(expr.arg)}, {expr.depth})"
    if isinstance(expr, Rose):
        return f"$rose({print_expr(expr.arg)})"
    if isinstance(expr, Fell):
        return f"$fell({print_expr(expr.arg)})"
    if isinstance(expr, Stable):
        return f"$stable({print_expr(expr.arg)})"
    raise TypeError(f"not a boolean expression: {expr!r}")


def _negative_lit(expr: BoolExpr) -> bool:
    return isinstance(expr, IntLit) and expr.value < 0


def print_delay(d: DelayRange) -> str:
    return f"##{d.lo}" if d.lo == d.hi else f"##[{d.lo}:{d.hi}]"


def print_sequence(seq: SequenceExpr) -> str:
    compound = len(seq.elements) > 1 or seq.lead is not None

    def elem(e: BoolExpr) -> str:
        text = print_expr(e)
        return f"({text})" if compound and _prec(e) < 100 else text

    parts = []
    if seq.lead is not None:
        parts.append(print_delay(seq.lead))
    for k, e in enumerate(seq.elements):
        if k > 0:
            parts.append(print_delay(seq.delays[k - 1]))
        parts.append(elem(e))
    return " ".join(parts)


def print_property(body: PropertyExpr) -> str:
    if isinstance(body, Implication):
        return f"{print_sequence(body.antecedent)} {body.operator} {print_sequence(body.consequent)}"
    assert isinstance(body, SeqProp)
    return print_sequence(body.seq)


def print_property_spec(ast: AssertionAst) -> str:
    """The clocked body only: ``@(posedge clk) [disable iff (...)] prop``."""
    head = f"@(posedge {ast.clock})"
    if ast.disable is not None:
        head += f" disable iff ({print_expr(ast.disable)})"
    return f"{head} {print_property(ast.body)}"


def pretty_print(ast: AssertionAst | list[AssertionAst] | tuple) -> str:
    """Render one assertion, or a list of them separated by blank lines."""
    if isinstance(ast, (list, tuple)):
        return "\n".join(pretty_print(a) for a in ast)
    lines = [
        f"property {ast.name};",
        f"  {print_property_spec(ast)};",
        "endproperty",
        f"assert property ({ast.name});",
    ]
    g = ast.generate
    if g is None:
        return "\n".join(lines) + "\n"
    label = f" : {g.label}" if g.label else ""
    out = [
        "generate",
        f"  for (genvar {g.loop_var} = {g.lower}; {g.loop_var} < {g.upper}; {g.loop_var}++) begin{label}",
    ]
    out += ["    " + line for line in lines]
    out += ["  end", "endgenerate"]
    return "\n".join(out) + "\n"
