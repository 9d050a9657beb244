"""Tolerant parser for named SVA properties and their assert directives.

The parser never raises on bad input. Each malformed property is reported as
an error :class:`Diagnostic` and skipped; parsing resumes at the next
property. Loose but unambiguous spellings that LLMs commonly produce
(``end property``, a parenthesised ``property (name);``, a whole property
wrapped in parentheses, unbalanced trailing parentheses, ``else $fatal(...)``
inside the property, a missing ``endproperty``) are accepted with a warning.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from ..diagnostics import Diagnostic
from .ast import (
    SAMPLED_FUNCS,
    And,
    Arith,
    AssertionAst,
    BoolExpr,
    Cmp,
    DelayRange,
    GenerateBinding,
    Ident,
    Implication,
    IntLit,
    Not,
    Or,
    Past,
    PropertyExpr,
    SeqProp,
    SequenceExpr,
    StrLit,
    walk,
)
from .lexer import Token, tokenize


class ParseError(Exception):
    def __init__(self, message: str, tok: Token | None, code: str = "SyntaxError"):
        super().__init__(message)
        self.message = message
        self.tok = tok
        self.code = code


# ----------------------------------------------------------------------------
# raw (pre-conversion) nodes produced by the expression parser


@dataclass(frozen=True)
class _Group:
    inner: object


@dataclass(frozen=True)
class _Seq:
    lead: DelayRange | None
    items: tuple  # raw nodes
    delays: tuple[DelayRange, ...]


@dataclass(frozen=True)
class _Impl:
    lhs: object
    overlapping: bool
    rhs: object
    tok: Token


_BINARY_BP = {
    "|->": 10,
    "|=>": 10,
    "##": 20,
    "||": 30,
    "&&": 40,
    "==": 50,
    "!=": 50,
    "===": 50,
    "!==": 50,
    "<": 60,
    "<=": 60,
    ">": 60,
    ">=": 60,
    "+": 70,
    "-": 70,
}
_PREFIX_BP = 80
_UNSUPPORTED_OPS = {
    "&": "bitwise '&'",
    "|": "bitwise '|'",
    "^": "'^'",
    "~": "'~'",
    "*": "'*'",
    "/": "'/'",
    "%": "'%'",
    "?": "conditional operator",
}
_BODY_STOPS = {"assert", "assume", "cover", "property", "endgenerate", "end", "endmodule", "sequence", "generate"}


def _strip(node):
    while isinstance(node, _Group):
        node = node.inner
    return node


class _ExprParser:
    """Pratt parser over one property body's token list."""

    def __init__(self, toks: list[Token], warn):
        self.toks = toks
        self.i = 0
        self.warn = warn

    def peek(self, k: int = 0) -> Token:
        j = min(self.i + k, len(self.toks) - 1)
        return self.toks[j]

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind != "eof":
            self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.next()
        if not tok.is_(text):
            raise ParseError(f"expected {text!r}, found {tok.text or 'end of property'!r}", tok)
        return tok

    # --- expressions

    def parse(self, rbp: int = 0):
        left = self.nud(self.next())
        while True:
            tok = self.peek()
            if tok.kind != "op":
                break
            if tok.text in _UNSUPPORTED_OPS:
                raise ParseError(f"unsupported operator {_UNSUPPORTED_OPS[tok.text]}", tok, "UnsupportedSyntax")
            lbp = _BINARY_BP.get(tok.text)
            if lbp is None or lbp <= rbp:
                break
            self.next()
            left = self.led(tok, left)
        return left

    def nud(self, tok: Token):
        if tok.kind == "eof":
            raise ParseError("unexpected end of property", tok)
        if tok.is_("("):
            inner = self.parse(0)
            self.expect(")")
            return _Group(inner)
        if tok.is_("!"):
            return Not(self.to_bool(self.parse(_PREFIX_BP), tok))
        if tok.is_("-") and self.peek().kind == "int":
            lit = self.next()
            if lit.value is None:
                raise ParseError("x/z literals are not supported", lit, "UnsupportedSyntax")
            return IntLit(-lit.value)
        if tok.is_("##"):
            delay = self.delay(tok)
            operand = self.parse(_BINARY_BP["##"])
            return _Seq(delay, (operand,), ())
        if tok.kind == "int":
            if tok.value is None:
                raise ParseError("x/z literals are not supported", tok, "UnsupportedSyntax")
            return IntLit(tok.value)
        if tok.kind == "str":
            if tok.text.startswith("'"):
                self.warn("SingleQuotedString", f"single-quoted string {tok.text} read as a string literal", tok)
            return StrLit(tok.value)
        if tok.kind == "ident":
            if tok.text in _KEYWORDS:
                raise ParseError(f"unexpected keyword {tok.text!r}", tok)
            index = None
            if self.peek().is_("["):
                self.next()
                index = self.to_bool(self.parse(0), tok)
                if self.peek().is_(":"):
                    raise ParseError("part-selects are not supported", self.peek(), "UnsupportedSyntax")
                self.expect("]")
            return Ident(tok.text, index, span=(tok.start, tok.end))
        if tok.kind == "sysid":
            return self.sysfunc(tok)
        if tok.kind == "bad":
            raise ParseError(f"unexpected character {tok.text[:1]!r}", tok)
        raise ParseError(f"unexpected {tok.text!r}", tok)

    def sysfunc(self, tok: Token):
        cls = SAMPLED_FUNCS.get(tok.text)
        if cls is None:
            raise ParseError(f"unsupported system function {tok.text}", tok, "UnsupportedFunction")
        self.expect("(")
        arg = self.to_bool(self.parse(0), tok)
        depth = None
        if cls is Past and self.peek().is_(","):
            self.next()
            dtok = self.next()
            if dtok.kind != "int" or dtok.value is None or dtok.value < 1:
                raise ParseError("$past depth must be a positive integer literal", dtok)
            depth = dtok.value
        self.expect(")")
        if cls is Past:
            return Past(arg, depth)
        return cls(arg)

    def delay(self, tok: Token) -> DelayRange:
        nxt = self.next()
        if nxt.kind == "int" and nxt.value is not None:
            return DelayRange(nxt.value, nxt.value)
        if nxt.is_("["):
            lo = self.next()
            if lo.kind != "int" or lo.value is None:
                raise ParseError("delay bound must be an integer", lo, "UnsupportedSyntax")
            self.expect(":")
            hi = self.next()
            if hi.is_("$"):
                raise ParseError("unbounded delays are not supported", hi, "UnsupportedSyntax")
            if hi.kind != "int" or hi.value is None:
                raise ParseError("delay bound must be an integer", hi, "UnsupportedSyntax")
            self.expect("]")
            if hi.value < lo.value:
                raise ParseError("delay range upper bound below lower bound", hi)
            return DelayRange(lo.value, hi.value)
        raise ParseError("delay must be ##n or ##[m:n] with integer literals", nxt, "UnsupportedSyntax")

    def led(self, tok: Token, left):
        op = tok.text
        if op in ("|->", "|=>"):
            rhs = self.parse(_BINARY_BP[op] - 1)
            return _Impl(left, op == "|->", rhs, tok)
        if op == "##":
            delay = self.delay(tok)
            rhs = self.parse(_BINARY_BP["##"])
            if isinstance(left, _Seq):
                return _Seq(left.lead, left.items + (rhs,), left.delays + (delay,))
            return _Seq(None, (left, rhs), (delay,))
        rhs = self.parse(_BINARY_BP[op])
        lhs_b = self.to_bool(left, tok)
        rhs_b = self.to_bool(rhs, tok)
        if op == "&&":
            if isinstance(left, And):
                return And(left.args + (rhs_b,))
            return And((lhs_b, rhs_b))
        if op == "||":
            if isinstance(left, Or):
                return Or(left.args + (rhs_b,))
            return Or((lhs_b, rhs_b))
        if op in ("+", "-"):
            return Arith(op, lhs_b, rhs_b)
        return Cmp(op, lhs_b, rhs_b)

    def to_bool(self, node, tok: Token) -> BoolExpr:
        node = _strip(node)
        if isinstance(node, (_Seq, _Impl)):
            raise ParseError("sequence or implication used as a boolean operand", tok, "UnsupportedSyntax")
        return node

    # --- conversion to sequences / properties

    def to_seq(self, node, tok: Token) -> SequenceExpr:
        node = _strip(node)
        if isinstance(node, _Impl):
            raise ParseError("nested implications are not supported", node.tok, "NestedImplication")
        if not isinstance(node, _Seq):
            return SequenceExpr((node,))
        lead = node.lead
        elements: list[BoolExpr] = []
        delays: list[DelayRange] = []
        pending: DelayRange | None = None  # delay waiting for its right-hand element
        for k, item in enumerate(node.items):
            if k > 0:
                pending = node.delays[k - 1]
            sub = self.to_seq(item, tok)
            if sub.lead is not None:
                if k == 0:
                    lead = sub.lead if lead is None else _add(lead, sub.lead)
                else:
                    pending = _add(pending, sub.lead)
            for j, elem in enumerate(sub.elements):
                if j > 0:
                    pending = sub.delays[j - 1]
                if elements:
                    delays.append(pending)
                elements.append(elem)
                pending = None
        return SequenceExpr(tuple(elements), tuple(delays), lead)

    def to_property(self, node, tok: Token) -> PropertyExpr:
        node = _strip(node)
        if isinstance(node, _Impl):
            return Implication(self.to_seq(node.lhs, node.tok), node.overlapping, self.to_seq(node.rhs, node.tok))
        return SeqProp(self.to_seq(node, tok))


def _add(a: DelayRange, b: DelayRange) -> DelayRange:
    return DelayRange(a.lo + b.lo, a.hi + b.hi)


_KEYWORDS = {
    "property", "endproperty", "assert", "assume", "cover", "disable", "iff", "posedge",
    "negedge", "generate", "endgenerate", "for", "genvar", "begin", "end", "else",
    "sequence", "endsequence", "module", "endmodule", "or", "and", "not", "if",
    "throughout", "within", "intersect", "first_match",
}


@dataclass
class _Pending:
    ast: AssertionAst
    asserted: bool = False


class SvaParser:
    def __init__(self, source: str | bytes, origin: str = "llm"):
        if isinstance(source, (bytes, bytearray)):
            source = bytes(source).decode("utf-8", errors="replace")
        self.source = source
        self.origin = origin
        self.toks = tokenize(source)
        self.i = 0
        self.diags: list[Diagnostic] = []
        self.props: dict[str, _Pending] = {}
        self.failed: set[str] = set()
        self.scopes: list[GenerateBinding | None] = []
        self.anon = 0
        self._byte_cache: list[int] | None = None

    # --- diagnostics

    def _bytes(self, pos: int) -> int:
        if self.source.isascii():
            return pos
        if self._byte_cache is None:
            acc = [0]
            for ch in self.source:
                acc.append(acc[-1] + len(ch.encode("utf-8", errors="replace")))
            self._byte_cache = acc
        return self._byte_cache[pos]

    def _span(self, start: int, end: int) -> tuple[int, int]:
        if end <= start:
            end = start + 1
        a = self._bytes(min(start, len(self.source)))
        b = self._bytes(min(end, len(self.source)))
        if b <= a:
            b = a + 1
        return (a, b)

    def diag(self, severity: str, code: str, message: str, tok: Token | None, subject: str | None = None):
        if tok is None:
            tok = self.toks[-1]
        self.diags.append(Diagnostic(severity, code, message, self._span(tok.start, tok.end), subject))

    # --- token helpers

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind != "eof":
            self.i += 1
        return tok

    def skip_to_semicolon(self):
        while self.peek().kind != "eof" and not self.peek().is_(";"):
            self.next()
        if self.peek().is_(";"):
            self.next()

    # --- driver

    def parse(self) -> tuple[list[AssertionAst], list[Diagnostic]]:
        junk_start: Token | None = None
        junk_end: Token | None = None
        while self.peek().kind != "eof":
            tok = self.peek()
            handled = True
            if tok.is_("property"):
                self.parse_property()
            elif tok.is_("assert"):
                self.parse_assert(None)
            elif tok.kind == "ident" and self.peek(1).is_(":") and self.peek(2).is_("assert"):
                label = self.next().text
                self.next()
                self.parse_assert(label)
            elif tok.is_("assume", "cover"):
                self.diag("warning", "IgnoredDirective", f"'{tok.text}' directives are ignored", tok)
                self.next()
                self.skip_directive()
            elif tok.is_("sequence"):
                self.diag("error", "UnsupportedSyntax", "named sequence declarations are not supported", tok)
                while self.peek().kind != "eof" and not self.peek().is_("endsequence"):
                    self.next()
                self.next()
            elif tok.is_("generate", "endgenerate"):
                self.next()
            elif tok.is_("genvar"):
                self.skip_to_semicolon()
            elif tok.is_("for"):
                self.parse_for()
            elif tok.is_("begin"):
                self.next()
                self.skip_label()
                self.scopes.append(self.current_binding())
            elif tok.is_("end"):
                self.next()
                self.skip_label()
                if self.scopes:
                    self.scopes.pop()
            else:
                handled = False
                if junk_start is None:
                    junk_start = tok
                junk_end = tok
                self.next()
            if handled and junk_start is not None:
                self.flush_junk(junk_start, junk_end)
                junk_start = None
        if junk_start is not None:
            self.flush_junk(junk_start, junk_end)

        result = []
        for name, pending in self.props.items():
            if not pending.asserted:
                self.diags.append(
                    Diagnostic("warning", "UnassertedProperty", f"property '{name}' has no assert directive",
                               pending.ast.span or (0, 1), name)
                )
            result.append(pending.ast)
        self.diags.sort(key=lambda d: d.span)
        return result, self.diags

    def flush_junk(self, first: Token, last: Token):
        self.diags.append(
            Diagnostic("warning", "IgnoredText", "text outside property declarations ignored",
                       self._span(first.start, last.end))
        )

    def skip_label(self):
        if self.peek().is_(":") and self.peek(1).kind == "ident":
            self.next()
            self.next()

    def skip_directive(self):
        depth = 0
        while self.peek().kind != "eof":
            tok = self.next()
            if tok.is_("("):
                depth += 1
            elif tok.is_(")"):
                depth -= 1
            elif tok.is_(";") and depth <= 0:
                return

    def current_binding(self) -> GenerateBinding | None:
        for scope in reversed(self.scopes):
            if scope is not None:
                return scope
        return None

    # --- generate loops

    def parse_for(self):
        start = self.next()
        try:
            binding = self.loop_header()
        except ParseError as exc:
            self.diag("error", exc.code, exc.message, exc.tok or start)
            # skip the header; the body still opens a scope
            while self.peek().kind != "eof" and not self.peek().is_("begin"):
                self.next()
            binding = None
        if self.peek().is_("begin"):
            self.next()
            if self.peek().is_(":") and self.peek(1).kind == "ident":
                self.next()
                label = self.next().text
                if binding is not None:
                    binding = replace(binding, label=label)
        else:
            self.diag("error", "SyntaxError", "generate loop body must be a begin/end block", self.peek())
        if binding is not None and self.current_binding() is not None:
            self.diag("error", "UnsupportedSyntax", "nested generate loops are not supported", start)
        self.scopes.append(binding)

    def loop_header(self) -> GenerateBinding:
        p = _ExprParser(self.toks, None)
        p.i = self.i
        p.expect("(")
        if p.peek().is_("genvar"):
            p.next()
        var = p.next()
        if var.kind != "ident":
            raise ParseError("expected loop variable", var)
        p.expect("=")
        lo = p.next()
        if lo.kind != "int" or lo.value is None:
            raise ParseError("loop start must be an integer literal", lo, "UnsupportedSyntax")
        p.expect(";")
        cond_var = p.next()
        if cond_var.text != var.text:
            raise ParseError("loop condition must test the loop variable", cond_var)
        cmp = p.next()
        if not cmp.is_("<", "<="):
            raise ParseError("loop condition must be '<' or '<='", cmp, "UnsupportedSyntax")
        bound = p.next()
        if bound.kind == "int" and bound.value is not None:
            upper: int | str = bound.value + (1 if cmp.text == "<=" else 0)
        elif bound.kind == "ident":
            if cmp.text == "<=":
                raise ParseError("'<=' against a parameter bound is not supported", bound, "UnsupportedSyntax")
            upper = bound.text
        else:
            raise ParseError("loop bound must be an integer or parameter", bound)
        p.expect(";")
        # t++ | ++t | t += 1 | t = t + 1
        step = [p.next()]
        while not p.peek().is_(")") and p.peek().kind != "eof":
            step.append(p.next())
        texts = [t.text for t in step]
        ok = texts in ([var.text, "++"], ["++", var.text], [var.text, "+=", "1"], [var.text, "=", var.text, "+", "1"])
        if not ok:
            raise ParseError("loop step must increment the loop variable by one", step[0], "UnsupportedSyntax")
        p.expect(")")
        self.i = p.i
        return GenerateBinding(var.text, lo.value, upper)

    # --- property declarations

    def parse_property(self):
        kw = self.next()
        name_tok = self.peek()
        if name_tok.is_("("):
            if self.peek(1).kind == "ident" and self.peek(2).is_(")"):
                self.next()
                name_tok = self.next()
                self.next()
                self.diag("warning", "ParenthesizedName", "property name written in parentheses", name_tok,
                          name_tok.text)
            else:
                name_tok = Token("bad", "(", name_tok.start, name_tok.end)
        elif name_tok.kind == "ident" and name_tok.text not in _KEYWORDS:
            self.next()
        if name_tok.kind != "ident" or name_tok.text in _KEYWORDS:
            self.diag("error", "SyntaxError", "expected a property name", name_tok)
            self.skip_property_body()
            return
        name = name_tok.text
        if self.peek().is_("("):
            self.diag("error", "UnsupportedSyntax", "property formal arguments are not supported", self.peek(), name)
            self.failed.add(name)
            self.skip_property_body()
            return
        if self.peek().is_(";"):
            self.next()
        else:
            self.diag("warning", "MissingSemicolon", "missing ';' after property name", name_tok, name)

        body_start = self.i
        while True:
            tok = self.peek()
            if tok.kind == "eof" or tok.is_("endproperty"):
                break
            if tok.is_("end") and self.peek(1).is_("property"):
                break
            if tok.is_(*_BODY_STOPS):
                break
            self.next()
        body = self.toks[body_start : self.i]
        end_tok = self.peek()
        if end_tok.is_("endproperty"):
            self.next()
            self.skip_label()
        elif end_tok.is_("end") and self.peek(1).is_("property"):
            self.next()
            self.next()
            self.diag("warning", "SpacedEndproperty", "'end property' read as 'endproperty'", end_tok, name)
        else:
            self.diag("warning", "MissingEndproperty", f"property '{name}' is not closed by endproperty", kw, name)

        span = self._span(kw.start, (body[-1].end if body else name_tok.end))
        try:
            ast = self.parse_body(name, body, name_tok)
        except ParseError as exc:
            self.diag("error", exc.code, exc.message, exc.tok or name_tok, name)
            self.failed.add(name)
            return
        ast = replace(ast, span=span)
        if name in self.props:
            self.diag("error", "DuplicateProperty", f"property '{name}' declared more than once", name_tok, name)
            return
        self.props[name] = _Pending(ast)

    def skip_property_body(self):
        while self.peek().kind != "eof" and not self.peek().is_("endproperty", "assert", "property"):
            if self.peek().is_("end") and self.peek(1).is_("property"):
                self.next()
                self.next()
                return
            self.next()
        if self.peek().is_("endproperty"):
            self.next()

    def parse_body(self, name: str, body: list[Token], name_tok: Token) -> AssertionAst:
        def warn(code, message, tok):
            self.diag("warning", code, message, tok, name)

        toks = list(body)
        if not toks:
            raise ParseError(f"property '{name}' has an empty body", name_tok)
        if toks[-1].is_(";"):
            while toks and toks[-1].is_(";"):
                toks.pop()
        else:
            warn("MissingSemicolon", "property body not terminated by ';'", toks[-1])
        if not toks:
            raise ParseError(f"property '{name}' has an empty body", name_tok)

        # trailing action block: `... else $fatal(...)`
        depth = 0
        for k, tok in enumerate(toks):
            if tok.is_("("):
                depth += 1
            elif tok.is_(")"):
                depth -= 1
            elif tok.is_("else") and depth <= 0:
                warn("DiscardedAction", "action block inside property discarded", tok)
                toks = toks[:k]
                break
        for tok in toks:
            if tok.is_(";"):
                raise ParseError("unexpected ';' inside property body", tok)

        # parenthesis balancing
        depth = 0
        kept = []
        for tok in toks:
            if tok.is_("("):
                depth += 1
            elif tok.is_(")"):
                if depth == 0:
                    warn("UnbalancedParen", "unmatched ')' dropped", tok)
                    continue
                depth -= 1
            kept.append(tok)
        toks = kept
        if depth > 0:
            warn("UnbalancedParen", f"{depth} unclosed '(' closed at end of property", toks[-1])
            last = toks[-1]
            toks += [Token("op", ")", last.end, last.end)] * depth

        # `( @(posedge clk) ... )`
        if len(toks) >= 2 and toks[0].is_("(") and toks[1].is_("@") and _matching(toks, 0) == len(toks) - 1:
            warn("ParenthesizedProperty", "parentheses around the whole property removed", toks[0])
            toks = toks[1:-1]

        eof = Token("eof", "", toks[-1].end if toks else name_tok.end, toks[-1].end if toks else name_tok.end)
        p = _ExprParser(toks + [eof], warn)
        at = p.next()
        if not at.is_("@"):
            raise ParseError("property must start with a clocking event '@(posedge clk)'", at, "MissingClock")
        p.expect("(")
        edge = p.next()
        if not edge.is_("posedge"):
            raise ParseError("only '@(posedge <clock>)' clocking is supported", edge, "UnsupportedClock")
        clk = p.next()
        if clk.kind != "ident" or clk.text in _KEYWORDS:
            raise ParseError("expected a clock signal name", clk)
        if not p.peek().is_(")"):
            raise ParseError("only a single posedge clock is supported", p.peek(), "UnsupportedClock")
        p.next()

        disable = None
        if p.peek().is_("disable"):
            dtok = p.next()
            iff = p.next()
            if not iff.is_("iff"):
                raise ParseError("expected 'iff' after 'disable'", iff)
            p.expect("(")
            disable = p.to_bool(p.parse(0), dtok)
            p.expect(")")

        start = p.peek()
        node = p.parse(0)
        rest = p.peek()
        if rest.kind != "eof":
            raise ParseError(f"unexpected {rest.text!r} in property body", rest)
        prop = p.to_property(node, start)

        binding = self.current_binding()
        if binding is not None:
            used = False
            for seq in (prop.antecedent, prop.consequent) if isinstance(prop, Implication) else (prop.seq,):
                for elem in seq.elements:
                    for n in walk(elem):
                        if isinstance(n, Ident) and n.index is not None:
                            if any(isinstance(m, Ident) and m.name == binding.loop_var for m in walk(n.index)):
                                used = True
            if not used:
                warn("LoopVarUnused", f"generate variable '{binding.loop_var}' is never used as an index", name_tok)
        return AssertionAst(name=name, clock=clk.text, body=prop, disable=disable, origin=self.origin,
                            generate=binding)

    # --- assert directives

    def parse_assert(self, label: str | None):
        kw = self.next()
        if not self.peek().is_("property"):
            self.diag("error", "SyntaxError", "expected 'property' after 'assert'", self.peek())
            self.skip_directive()
            return
        self.next()
        target: Token | None = None
        if self.peek().is_("("):
            if self.peek(1).kind == "ident" and self.peek(2).is_(")"):
                self.next()
                target = self.next()
                self.next()
            else:
                self.parse_inline(kw, label)
                self.finish_assert(kw, None)
                return
        elif self.peek().kind == "ident" and self.peek().text not in _KEYWORDS:
            target = self.next()
            self.diag("warning", "AssertWithoutParens", "assert property target without parentheses", target,
                      target.text)
        else:
            self.diag("error", "SyntaxError", "expected a property name after 'assert property'", self.peek())
            self.skip_directive()
            return
        self.bind(target)
        self.finish_assert(kw, target.text)

    def finish_assert(self, kw: Token, name: str | None):
        if self.peek().is_("else"):
            tok = self.next()
            self.diag("warning", "DiscardedAction", "assert action block discarded", tok, name)
            if self.peek().is_("begin"):
                depth = 0
                while self.peek().kind != "eof":
                    t = self.next()
                    if t.is_("begin"):
                        depth += 1
                    elif t.is_("end"):
                        depth -= 1
                        if depth == 0:
                            break
                return
            self.skip_directive()
            return
        if self.peek().is_(";"):
            self.next()
        else:
            self.diag("warning", "MissingSemicolon", "assert directive not terminated by ';'", kw, name)

    def bind(self, target: Token):
        name = target.text
        if name in self.props:
            self.props[name].asserted = True
            return
        if name in self.failed:
            return
        unasserted = [n for n, p in self.props.items() if not p.asserted]
        if unasserted and unasserted[-1] == list(self.props)[-1]:
            actual = unasserted[-1]
            self.diag("warning", "AssertNameMismatch",
                      f"assert names '{name}' but follows property '{actual}'; bound to '{actual}'", target, actual)
            self.props[actual].asserted = True
            return
        self.diag("error", "UnknownProperty", f"assert references undeclared property '{name}'", target, name)

    def parse_inline(self, kw: Token, label: str | None):
        open_tok = self.next()
        depth = 1
        body: list[Token] = []
        while self.peek().kind != "eof":
            tok = self.next()
            if tok.is_("("):
                depth += 1
            elif tok.is_(")"):
                depth -= 1
                if depth == 0:
                    break
            body.append(tok)
        if label is None:
            self.anon += 1
            name = f"assert_{self.anon}"
            self.diag("warning", "AnonymousAssertion", f"inline assertion named '{name}'", kw, name)
        else:
            name = label
        name_tok = Token("ident", name, kw.start, kw.end)
        if not body or not body[0].is_("@"):
            self.diag("error", "SyntaxError", "inline assert property must start with a clocking event", open_tok,
                      name)
            self.failed.add(name)
            return
        body.append(Token("op", ";", open_tok.end, open_tok.end))
        try:
            ast = self.parse_body(name, body, name_tok)
        except ParseError as exc:
            self.diag("error", exc.code, exc.message, exc.tok or kw, name)
            self.failed.add(name)
            return
        if name in self.props:
            self.diag("error", "DuplicateProperty", f"property '{name}' declared more than once", kw, name)
            return
        self.props[name] = _Pending(replace(ast, span=self._span(kw.start, body[-1].end)), asserted=True)


def _matching(toks: list[Token], k: int) -> int:
    depth = 0
    for j in range(k, len(toks)):
        if toks[j].is_("("):
            depth += 1
        elif toks[j].is_(")"):
            depth -= 1
            if depth == 0:
                return j
    return -1


def parse_assertions(source: str | bytes, origin: str = "llm") -> tuple[list[AssertionAst], list[Diagnostic]]:
    """Parse every property/assert pair in ``source``.

    Returns the ASTs in declaration order together with all diagnostics.
    Generate-loop properties keep their :class:`GenerateBinding`; call
    :func:`svaflow.sva.expand_generate` to instantiate them.
    """
    try:
        return SvaParser(source, origin).parse()
    except RecursionError:
        return [], [Diagnostic("error", "TooDeep", "expression nesting too deep", (0, max(1, len(source))))]
