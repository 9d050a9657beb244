"""Immutable AST for the supported SVA subset.

Boolean layer: identifiers, literals, logical/relational/additive operators
and the sampled-value functions. Sequence layer: boolean elements joined by
fixed or ranged cycle delays, with an optional leading delay. Property layer:
a sequence or a single implication.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union

CMP_OPS = ("==", "!=", "===", "!==", "<", "<=", ">", ">=")
ARITH_OPS = ("+", "-")
ORIGINS = ("llm", "reference", "manual")


@dataclass(frozen=True)
class Ident:
    name: str
    index: "BoolExpr | None" = None
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class StrLit:
    """Quoted text compared against a state variable; evaluates to its packed ASCII code."""

    text: str

    @property
    def value(self) -> int:
        return int.from_bytes(self.text.encode("latin-1", "replace"), "big") if self.text else 0


@dataclass(frozen=True)
class Not:
    arg: "BoolExpr"


@dataclass(frozen=True)
class And:
    args: tuple["BoolExpr", ...]

    def __post_init__(self):
        if len(self.args) < 2:
            raise ValueError("And needs at least two operands")


@dataclass(frozen=True)
class Or:
    args: tuple["BoolExpr", ...]

    def __post_init__(self):
        if len(self.args) < 2:
            raise ValueError("Or needs at least two operands")


@dataclass(frozen=True)
class Cmp:
    op: str
    lhs: "BoolExpr"
    rhs: "BoolExpr"

    def __post_init__(self):
        if self.op not in CMP_OPS:
            raise ValueError(f"bad comparison operator {self.op!r}")


@dataclass(frozen=True)
class Arith:
    op: str
    lhs: "BoolExpr"
    rhs: "BoolExpr"

    def __post_init__(self):
        if self.op not in ARITH_OPS:
            raise ValueError(f"bad arithmetic operator {self.op!r}")


@dataclass(frozen=True)
class Past:
    arg: "BoolExpr"
    depth: int | None = None  # None: written without an explicit depth

    def __post_init__(self):
        if self.depth is not None and self.depth < 1:
            raise ValueError("$past depth must be >= 1")


@dataclass(frozen=True)
class Rose:
    arg: "BoolExpr"


@dataclass(frozen=True)
class Fell:
    arg: "BoolExpr"


@dataclass(frozen=True)
class Stable:
    arg: "BoolExpr"


BoolExpr = Union[Ident, IntLit, StrLit, Not, And, Or, Cmp, Arith, Past, Rose, Fell, Stable]
SAMPLED_FUNCS = {"$past": Past, "$rose": Rose, "$fell": Fell, "$stable": Stable}


@dataclass(frozen=True)
class DelayRange:
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo < 0 or self.hi < self.lo:
            raise ValueError(f"bad delay range [{self.lo}:{self.hi}]")

    def shifted(self, n: int) -> "DelayRange":
        return DelayRange(self.lo + n, self.hi + n)


@dataclass(frozen=True)
class SequenceExpr:
    elements: tuple[BoolExpr, ...]
    delays: tuple[DelayRange, ...] = ()
    lead: DelayRange | None = None  # `##n a ...` with nothing before the first delay

    def __post_init__(self):
        if not self.elements:
            raise ValueError("a sequence needs at least one element")
        if len(self.delays) != len(self.elements) - 1:
            raise ValueError("delays must separate elements")


@dataclass(frozen=True)
class SeqProp:
    seq: SequenceExpr


@dataclass(frozen=True)
class Implication:
    antecedent: SequenceExpr
    overlapping: bool
    consequent: SequenceExpr

    @property
    def operator(self) -> str:
        return "|->" if self.overlapping else "|=>"


PropertyExpr = Union[SeqProp, Implication]


@dataclass(frozen=True)
class GenerateBinding:
    loop_var: str
    lower: int
    upper: int | str  # exclusive bound: literal or parameter name
    label: str | None = None


@dataclass(frozen=True)
class AssertionAst:
    name: str
    clock: str
    body: PropertyExpr
    disable: BoolExpr | None = None
    origin: str = "llm"
    generate: GenerateBinding | None = None
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.origin not in ORIGINS:
            raise ValueError(f"bad origin {self.origin!r}")


# --------------------------------------------------------------------------
# traversal helpers


def children(expr: BoolExpr) -> tuple[BoolExpr, ...]:
    if isinstance(expr, Ident):
        return (expr.index,) if expr.index is not None else ()
    if isinstance(expr, (IntLit, StrLit)):
        return ()
    if isinstance(expr, (And, Or)):
        return expr.args
    if isinstance(expr, (Cmp, Arith)):
        return (expr.lhs, expr.rhs)
    return (expr.arg,)


def walk(expr: BoolExpr) -> Iterator[BoolExpr]:
    yield expr
    for child in children(expr):
        yield from walk(child)


def sequences(body: PropertyExpr) -> tuple[SequenceExpr, ...]:
    if isinstance(body, Implication):
        return (body.antecedent, body.consequent)
    return (body.seq,)


def assertion_exprs(ast: AssertionAst) -> Iterator[BoolExpr]:
    """Every boolean element of the property body, then the disable condition."""
    for seq in sequences(ast.body):
        yield from seq.elements
    if ast.disable is not None:
        yield ast.disable


def identifiers(ast: AssertionAst) -> Iterator[Ident]:
    for expr in assertion_exprs(ast):
        for node in walk(expr):
            if isinstance(node, Ident):
                yield node


def referenced_signals(ast: AssertionAst) -> list[str]:
    """Distinct base names read by the assertion, in first-use order (loop variable excluded)."""
    loop_var = ast.generate.loop_var if ast.generate else None
    seen: dict[str, None] = {}
    for ident in identifiers(ast):
        if ident.name != loop_var:
            seen.setdefault(ident.name, None)
    return list(seen)


def max_past_depth(expr: BoolExpr) -> int:
    best = 0
    for node in walk(expr):
        if isinstance(node, (Rose, Fell, Stable)):
            best = max(best, 1 + max_past_depth(node.arg))
        elif isinstance(node, Past):
            best = max(best, (node.depth or 1) + max_past_depth(node.arg))
    return best
