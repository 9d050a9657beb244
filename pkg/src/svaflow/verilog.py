"""Declaration-level Verilog reader.

Only what is needed to learn a module's signal vocabulary is parsed: the
module header, port/net/variable declarations and integer parameters.
Procedural code, continuous assignments, instances and generate regions are
skipped by token-level block matching.
"""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, field
from fnmatch import fnmatchcase
from typing import Iterable

DEFAULT_CLOCK_PATTERNS = ("clk*", "*_clk", "clk_i")
DEFAULT_RESET_PATTERNS = ("rst*", "*rst_n*", "rst_ni")

DIRECTIONS = ("input", "output", "inout", "internal")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_$]*\Z")


class ExtractError(ValueError):
    """Base class for Verilog extraction failures."""

    code = "ExtractError"

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NoModuleFound(ExtractError):
    code = "NoModuleFound"


class UnbalancedBlock(ExtractError):
    code = "UnbalancedBlock"


class MalformedRange(ExtractError):
    code = "MalformedRange"


class UnsupportedSyntax(ExtractError):
    code = "UnsupportedSyntax"


@dataclass(frozen=True)
class RolePatterns:
    clock: tuple[str, ...] = DEFAULT_CLOCK_PATTERNS
    reset: tuple[str, ...] = DEFAULT_RESET_PATTERNS


def infer_role(name: str, config: RolePatterns | None = None) -> str:
    """Classify a signal name as ``clock``, ``reset`` or ``data``."""
    config = config or RolePatterns()
    if any(fnmatchcase(name, pat) for pat in config.clock):
        return "clock"
    if any(fnmatchcase(name, pat) for pat in config.reset):
        return "reset"
    return "data"


@dataclass(frozen=True)
class SignalDecl:
    name: str
    direction: str
    width: int = 1
    is_array: bool = False
    array_size: int | None = None
    role_hint: str = "data"

    def __post_init__(self):
        if not _IDENT_RE.match(self.name):
            raise ValueError(f"invalid identifier {self.name!r}")
        if self.direction not in DIRECTIONS:
            raise ValueError(f"invalid direction {self.direction!r}")
        if self.width < 1:
            raise ValueError("width must be >= 1")
        if self.is_array != (self.array_size is not None):
            raise ValueError("array_size must be given exactly when is_array")


@dataclass(frozen=True)
class SignalInventory:
    module_name: str
    signals: tuple[SignalDecl, ...] = ()
    parameters: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        names = [s.name for s in self.signals]
        if len(names) != len(set(names)):
            raise ValueError("duplicate signal names in inventory")

    def __contains__(self, name: str) -> bool:
        return self.get(name) is not None

    def get(self, name: str) -> SignalDecl | None:
        for sig in self.signals:
            if sig.name == name:
                return sig
        return None

    @property
    def names(self) -> list[str]:
        return [s.name for s in self.signals]

    def trace_widths(self) -> dict[str, int]:
        """Signal widths keyed the way a trace names them (arrays as ``name[i]``)."""
        out = {}
        for sig in self.signals:
            if sig.is_array:
                out.update({f"{sig.name}[{i}]": sig.width for i in range(sig.array_size)})
            else:
                out[sig.name] = sig.width
        return out

    @classmethod
    def from_trace(cls, trace) -> "SignalInventory":
        """Inventory stand-in built from the signals a trace carries."""
        sigs, seen = [], set()
        for key in trace.values:
            base, _, idx = key.partition("[")
            if base in seen:
                continue
            seen.add(base)
            if idx:
                size = sum(1 for k in trace.values if k.startswith(base + "["))
                sigs.append(SignalDecl(base, "internal", trace.width(key), True, size, infer_role(base)))
            else:
                sigs.append(SignalDecl(base, "internal", trace.width(key), role_hint=infer_role(base)))
        return cls(trace.name or "trace", tuple(sigs))

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "module": self.module_name,
            "parameters": dict(self.parameters),
            "signals": [asdict(s) for s in self.signals],
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: dict) -> "SignalInventory":
        return cls(
            module_name=data["module"],
            signals=tuple(SignalDecl(**s) for s in data["signals"]),
            parameters={k: int(v) for k, v in data.get("parameters", {}).items()},
        )


# --------------------------------------------------------------------------
# tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<line_comment>//[^\n]*)
  | (?P<block_comment>/\*.*?\*/)
  | (?P<directive>`[A-Za-z_]\w*)
  | (?P<escaped>\\\S+)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<number>\d+\s*'[sS]?[bBoOdDhH]\s*[0-9a-fA-FxXzZ_?]+|'[sS]?[bBoOdDhH][0-9a-fA-FxXzZ_?]+|'[01xXzZ]|\d[\d_]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_$]*|\$[A-Za-z_][A-Za-z0-9_$]*)
  | (?P<op><=|>=|==|!=|&&|\|\||<<|>>|\*\*|::|[-+*/%()\[\]{}:;,=#@.?<>!~&|^'])
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class _Tok:
    text: str
    kind: str
    line: int


def _tokenize(source: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    line = 1
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            if source.startswith("/*", pos):
                raise UnbalancedBlock("unterminated block comment", line)
            raise UnsupportedSyntax(f"unexpected character {source[pos]!r}", line)
        kind = m.lastgroup
        text = m.group()
        if kind == "directive":
            raise UnsupportedSyntax(f"preprocessor directive {text} is not supported", line)
        if kind == "escaped":
            raise UnsupportedSyntax(f"escaped identifier {text} is not supported", line)
        if kind not in ("ws", "line_comment", "block_comment"):
            toks.append(_Tok(text, kind, line))
        line += text.count("\n")
        pos = m.end()
    return toks


# --------------------------------------------------------------------------
# constant expressions in ranges

_SIZED_RE = re.compile(r"(\d+)?\s*'[sS]?([bBoOdDhH])\s*([0-9a-fA-F_]+)\Z")


def _number_value(text: str) -> int | None:
    text = text.replace("_", "")
    if text.isdigit():
        return int(text)
    m = _SIZED_RE.match(text)
    if m:
        base = {"b": 2, "o": 8, "d": 10, "h": 16}[m.group(2).lower()]
        return int(m.group(3), base)
    return None


class _ConstEval:
    """Integer evaluator for ``+ - * /`` expressions over parameters."""

    def __init__(self, toks: list[_Tok], params: dict[str, int]):
        self.toks = toks
        self.i = 0
        self.params = params

    def _peek(self) -> str | None:
        return self.toks[self.i].text if self.i < len(self.toks) else None

    def evaluate(self) -> int:
        value = self._sum()
        if self.i != len(self.toks):
            raise MalformedRange(f"unexpected token {self._peek()!r} in range", self.toks[self.i].line)
        return value

    def _sum(self) -> int:
        value = self._product()
        while self._peek() in ("+", "-"):
            op = self.toks[self.i].text
            self.i += 1
            rhs = self._product()
            value = value + rhs if op == "+" else value - rhs
        return value

    def _product(self) -> int:
        value = self._atom()
        while self._peek() in ("*", "/"):
            op = self.toks[self.i].text
            self.i += 1
            rhs = self._atom()
            if op == "/":
                if rhs == 0:
                    raise MalformedRange("division by zero in range")
                value //= rhs
            else:
                value *= rhs
        return value

    def _atom(self) -> int:
        if self.i >= len(self.toks):
            raise MalformedRange("empty range expression")
        tok = self.toks[self.i]
        self.i += 1
        if tok.text == "(":
            value = self._sum()
            if self._peek() != ")":
                raise MalformedRange("missing ')' in range", tok.line)
            self.i += 1
            return value
        if tok.text == "-":
            return -self._atom()
        if tok.kind == "number":
            value = _number_value(tok.text)
            if value is None:
                raise MalformedRange(f"non-integer literal {tok.text!r} in range", tok.line)
            return value
        if tok.kind == "ident" and tok.text in self.params:
            return self.params[tok.text]
        raise MalformedRange(f"cannot resolve {tok.text!r} in range", tok.line)


# --------------------------------------------------------------------------
# module parser

_NET_KEYWORDS = {
    "wire", "reg", "logic", "tri", "wand", "wor", "bit", "byte", "int",
    "integer", "shortint", "longint", "uwire", "var", "supply0", "supply1",
}
_FIXED_WIDTH = {"byte": 8, "shortint": 16, "int": 32, "integer": 32, "longint": 64}
_SIGN_KEYWORDS = {"signed", "unsigned"}
_SKIP_PROCEDURAL = {"always", "always_ff", "always_comb", "always_latch", "initial", "final"}
_BLOCK_PAIRS = {
    "begin": "end",
    "case": "endcase",
    "casez": "endcase",
    "casex": "endcase",
    "fork": "join",
    "generate": "endgenerate",
    "function": "endfunction",
    "task": "endtask",
    "specify": "endspecify",
    "class": "endclass",
    "interface": "endinterface",
    "package": "endpackage",
    "covergroup": "endgroup",
    "property": "endproperty",
    "sequence": "endsequence",
    "clocking": "endclocking",
}
_JOIN_ALIASES = {"join_any", "join_none"}


class _ModuleParser:
    def __init__(self, toks: list[_Tok], start: int, roles: RolePatterns, header_only: bool):
        self.toks = toks
        self.i = start
        self.roles = roles
        self.header_only = header_only
        self.params: dict[str, int] = {}
        # name -> [direction or None, width, array_size]
        self.decls: dict[str, list] = {}
        self.order: list[str] = []

    # token helpers
    def peek(self, k: int = 0) -> _Tok | None:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def text(self, k: int = 0) -> str | None:
        tok = self.peek(k)
        return tok.text if tok else None

    def next(self) -> _Tok:
        tok = self.peek()
        if tok is None:
            raise UnbalancedBlock("module without endmodule")
        self.i += 1
        return tok

    def expect(self, text: str) -> _Tok:
        tok = self.next()
        if tok.text != text:
            raise UnsupportedSyntax(f"expected {text!r}, found {tok.text!r}", tok.line)
        return tok

    def skip_balanced(self, open_: str, close: str) -> list[_Tok]:
        """Consume ``open_ ... close`` and return the inner tokens."""
        self.expect(open_)
        depth = 1
        inner: list[_Tok] = []
        while True:
            tok = self.next()
            if tok.text == "endmodule":
                raise UnbalancedBlock(f"unclosed {open_!r} before endmodule", tok.line)
            if tok.text == open_:
                depth += 1
            elif tok.text == close:
                depth -= 1
                if depth == 0:
                    return inner
            inner.append(tok)

    # declarations
    def declare(self, name: str, direction: str | None, width: int, array_size: int | None, line: int):
        if not _IDENT_RE.match(name):
            raise UnsupportedSyntax(f"invalid identifier {name!r}", line)
        if name in self.decls:
            entry = self.decls[name]
            if direction is not None:
                entry[0] = direction
            # `output x; reg [3:0] x;` -- the ranged redeclaration carries the width
            if width > 1:
                entry[1] = width
            if array_size is not None:
                entry[2] = array_size
            return
        self.decls[name] = [direction, width, array_size]
        self.order.append(name)

    def parse_range(self) -> int:
        inner = self.skip_balanced("[", "]")
        line = inner[0].line if inner else None
        depth = 0
        split = None
        for idx, tok in enumerate(inner):
            if tok.text in "([{":
                depth += 1
            elif tok.text in ")]}":
                depth -= 1
            elif tok.text == ":" and depth == 0:
                split = idx
                break
        if split is None:
            raise MalformedRange("range without ':'", line)
        msb = _ConstEval(inner[:split], self.params).evaluate()
        lsb = _ConstEval(inner[split + 1 :], self.params).evaluate()
        return abs(msb - lsb) + 1

    def parse_unpacked(self) -> int | None:
        size = None
        while self.text() == "[":
            inner = self.skip_balanced("[", "]")
            line = inner[0].line if inner else None
            colon = [k for k, t in enumerate(inner) if t.text == ":"]
            if colon:
                lo = _ConstEval(inner[: colon[0]], self.params).evaluate()
                hi = _ConstEval(inner[colon[0] + 1 :], self.params).evaluate()
                count = abs(hi - lo) + 1
            else:
                count = _ConstEval(inner, self.params).evaluate()
                if count < 1:
                    raise MalformedRange("array size must be positive", line)
            size = count if size is None else size * count
        return size

    def parse_type_width(self) -> int:
        """Consume net/type keywords, signing and packed ranges."""
        width = 1
        saw_range = False
        while True:
            t = self.text()
            if t in _NET_KEYWORDS:
                self.i += 1
                if t in _FIXED_WIDTH:
                    width = _FIXED_WIDTH[t]
            elif t in _SIGN_KEYWORDS:
                self.i += 1
            elif t == "[":
                w = self.parse_range()
                width = w if not saw_range else width * w
                saw_range = True
            else:
                return width

    def parse_parameter_list(self, terminators: set[str]):
        """``parameter [type] NAME = EXPR {, NAME = EXPR}`` up to a terminator."""
        while True:
            while self.text() in _NET_KEYWORDS | _SIGN_KEYWORDS | {"parameter", "localparam", "type"}:
                self.i += 1
            if self.text() == "[":
                self.skip_balanced("[", "]")
            name_tok = self.next()
            if name_tok.kind != "ident":
                raise UnsupportedSyntax(f"expected parameter name, found {name_tok.text!r}", name_tok.line)
            value_toks: list[_Tok] = []
            if self.text() == "=":
                self.i += 1
                depth = 0
                while True:
                    t = self.peek()
                    if t is None:
                        raise UnbalancedBlock("module without endmodule")
                    if depth == 0 and (t.text == "," or t.text in terminators):
                        break
                    if t.text in "([{":
                        depth += 1
                    elif t.text in ")]}":
                        depth -= 1
                    value_toks.append(t)
                    self.i += 1
            try:
                self.params[name_tok.text] = _ConstEval(value_toks, self.params).evaluate()
            except MalformedRange:
                pass  # non-integer parameters are not tracked
            if self.text() == ",":
                self.i += 1
                # `, parameter X = 1` or `, X = 1`
                continue
            return

    def parse_port_header(self):
        self.expect("(")
        if self.text() == ")":
            self.i += 1
            return
        direction: str | None = None
        width = 1
        while True:
            t = self.peek()
            if t is None:
                raise UnbalancedBlock("module without endmodule")
            if t.text in ("input", "output", "inout"):
                direction = t.text
                self.i += 1
                width = self.parse_type_width()
            elif t.text in _NET_KEYWORDS or t.text in _SIGN_KEYWORDS or t.text == "[":
                width = self.parse_type_width()
            name = self.next()
            if name.kind != "ident":
                raise UnsupportedSyntax(f"expected port name, found {name.text!r}", name.line)
            array = self.parse_unpacked()
            self.declare(name.text, direction, width, array, name.line)
            sep = self.next()
            if sep.text == ")":
                return
            if sep.text != ",":
                raise UnsupportedSyntax(f"unexpected {sep.text!r} in port list", sep.line)

    def parse_decl_statement(self, direction: str | None):
        width = self.parse_type_width()
        while True:
            name = self.next()
            if name.kind != "ident":
                raise UnsupportedSyntax(f"expected identifier, found {name.text!r}", name.line)
            array = self.parse_unpacked()
            self.declare(name.text, direction, width, array, name.line)
            if self.text() == "=":
                self.skip_expression()
            sep = self.next()
            if sep.text == ";":
                return
            if sep.text != ",":
                raise UnsupportedSyntax(f"unexpected {sep.text!r} in declaration", sep.line)

    def skip_expression(self):
        depth = 0
        while True:
            t = self.peek()
            if t is None or t.text == "endmodule":
                raise UnbalancedBlock("module without endmodule")
            if depth == 0 and t.text in (",", ";"):
                return
            if t.text in "([{":
                depth += 1
            elif t.text in ")]}":
                depth -= 1
            self.i += 1

    def skip_block(self, opener: str):
        closer = _BLOCK_PAIRS[opener]
        start = self.next()
        depth = 1
        while depth:
            t = self.next()
            if t.text == "endmodule":
                raise UnbalancedBlock(f"unclosed {opener!r} block", start.line)
            if t.text == opener or (closer == "endcase" and t.text in ("case", "casez", "casex")):
                depth += 1
            elif t.text == closer or (closer == "join" and t.text in _JOIN_ALIASES):
                depth -= 1

    def skip_statement(self):
        t = self.peek()
        if t is None:
            raise UnbalancedBlock("module without endmodule")
        if t.text in _BLOCK_PAIRS:
            self.skip_block(t.text)
            if self.text() == ":":  # `end : label`
                self.i += 2
            return
        if t.text == "@":
            self.skip_event_control()
            self.skip_statement()
            return
        if t.text in ("if", "for", "while", "repeat", "foreach"):
            self.i += 1
            if self.text() == "(":
                self.skip_balanced("(", ")")
            self.skip_statement()
            if t.text == "if" and self.text() == "else":
                self.i += 1
                self.skip_statement()
            return
        if t.text == "forever":
            self.i += 1
            self.skip_statement()
            return
        self.skip_to_semicolon()

    def skip_event_control(self):
        self.expect("@")
        if self.text() == "(":
            self.skip_balanced("(", ")")
        else:
            self.i += 1  # `@*` or `@clk`

    def skip_to_semicolon(self):
        depth = 0
        while True:
            t = self.next()
            if t.text == "endmodule":
                raise UnbalancedBlock("statement not terminated before endmodule", t.line)
            if t.text in ("begin",) and depth == 0:
                self.i -= 1
                self.skip_block("begin")
                continue
            if t.text in "([{":
                depth += 1
            elif t.text in ")]}":
                depth -= 1
            elif t.text == ";" and depth == 0:
                return

    def parse(self) -> SignalInventory:
        self.expect("module")
        name_tok = self.next()
        if name_tok.kind != "ident":
            raise UnsupportedSyntax("expected module name", name_tok.line)
        if self.text() == "#":
            self.i += 1
            self.expect("(")
            if self.text() != ")":
                self.parse_parameter_list({")"})
            self.expect(")")
        if self.text() == "(":
            self.parse_port_header()
        self.expect(";")
        while True:
            t = self.peek()
            if t is None:
                raise UnbalancedBlock(f"module {name_tok.text} without endmodule", name_tok.line)
            if t.text == "endmodule":
                self.i += 1
                break
            if t.text == "module":
                raise UnbalancedBlock(f"module {name_tok.text} without endmodule", name_tok.line)
            if t.text in ("input", "output", "inout"):
                self.i += 1
                self.parse_decl_statement(t.text)
            elif t.text in ("parameter", "localparam"):
                self.parse_parameter_list({";"})
                self.expect(";")
            elif t.text in _NET_KEYWORDS:
                if self.header_only:
                    self.skip_to_semicolon()
                else:
                    self.parse_decl_statement(None)
            elif t.text in _SKIP_PROCEDURAL:
                self.i += 1
                if self.text() == "@":
                    self.skip_event_control()
                self.skip_statement()
            elif t.text in _BLOCK_PAIRS:
                self.skip_block(t.text)
            elif t.text in ("genvar", "assign", "typedef", "import", "default"):
                self.skip_to_semicolon()
            else:
                self.skip_statement()

        signals = []
        for name in self.order:
            direction, width, array = self.decls[name]
            if direction is None:
                direction = "internal"
            signals.append(
                SignalDecl(
                    name=name,
                    direction=direction,
                    width=width,
                    is_array=array is not None,
                    array_size=array,
                    role_hint=infer_role(name, self.roles),
                )
            )
        return SignalInventory(name_tok.text, tuple(signals), dict(self.params))


def extract_signals(
    source: str,
    module: str | None = None,
    roles: RolePatterns | None = None,
    header_only: bool = False,
) -> SignalInventory:
    """Build the signal inventory of the first (or the named) module in ``source``.

    With ``header_only`` only ports and parameters are collected; internal
    ``reg``/``wire``/``logic`` declarations are skipped.
    """
    toks = _tokenize(source)
    starts = [k for k, t in enumerate(toks) if t.text in ("module", "macromodule")]
    if not starts:
        raise NoModuleFound("no module declaration found")
    roles = roles or RolePatterns()
    for k in starts:
        if module is None or (k + 1 < len(toks) and toks[k + 1].text == module):
            if toks[k].text == "macromodule":
                toks[k] = _Tok("module", "ident", toks[k].line)
            return _ModuleParser(toks, k, roles, header_only).parse()
    raise NoModuleFound(f"module {module!r} not found")


def render_declarations(inventory: SignalInventory) -> str:
    """Emit a Verilog module that re-extracts to ``inventory``."""
    lines = []
    params = "".join(
        f"  parameter {name} = {value};\n" for name, value in inventory.parameters.items()
    )
    ports = [s for s in inventory.signals if s.direction != "internal"]
    internals = [s for s in inventory.signals if s.direction == "internal"]

    def decl(sig: SignalDecl) -> str:
        packed = f" [{sig.width - 1}:0]" if sig.width > 1 else ""
        unpacked = f" [{sig.array_size}]" if sig.is_array else ""
        return f"logic{packed} {sig.name}{unpacked}"

    header = ",\n".join(f"  {s.direction} {decl(s)}" for s in ports)
    lines.append(f"module {inventory.module_name} (" + ("\n" + header + "\n" if ports else "") + ");")
    if params:
        lines.append(params.rstrip("\n"))
    for sig in internals:
        lines.append(f"  {decl(sig)};")
    lines.append("endmodule")
    return "\n".join(lines) + "\n"


def module_names(source: str) -> Iterable[str]:
    toks = _tokenize(source)
    for k, t in enumerate(toks):
        if t.text == "module" and k + 1 < len(toks):
            yield toks[k + 1].text
