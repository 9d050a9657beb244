"""Value Change Dump reader/writer.

Supported subset: ``$timescale``, ``$scope``/``$upscope``, ``$var`` of
1..64-bit nets, ``$enddefinitions``, ``$dumpvars``/``$dumpall`` blocks,
scalar (``0 1 x z``) and ``b``-vector changes.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from .model import ClockNotFound, MalformedVcd, NoEdges, Trace

_SKIP_SECTIONS = {"$date", "$version", "$comment"}
_IGNORED_KEYWORDS = {"$dumpvars", "$dumpall", "$dumpon", "$dumpoff", "$end"}


@dataclass
class _Var:
    code: str
    width: int
    names: list[str]


def _tokens(source: str) -> Iterator[tuple[str, int]]:
    for lineno, line in enumerate(source.splitlines(), 1):
        for tok in line.split():
            yield tok, lineno


def _scalar(ch: str) -> int | None:
    if ch == "0":
        return 0
    if ch == "1":
        return 1
    return None


def _vector(bits: str, line: int) -> int | None:
    bits = bits.lower()
    if any(c in "xz" for c in bits):
        return None
    try:
        return int(bits, 2)
    except ValueError:
        raise MalformedVcd(f"bad vector value 'b{bits}'", line) from None


def ingest_vcd(source: str, clock: str, name: str = "") -> Trace:
    """Sample every declared signal at the rising edges of ``clock``.

    A rising edge is a 0 -> 1 change of the clock. The sample at an edge is
    the value held before the edge's timestamp, so changes made at the same
    timestamp as the edge are only visible at the next edge.
    """
    toks = _tokens(source)
    timescale = "1ns"
    scope: list[str] = []
    vars_by_code: dict[str, _Var] = {}
    leaf_names: dict[str, str] = {}  # visible name -> code
    saw_enddefs = False

    for tok, line in toks:
        if tok in _SKIP_SECTIONS:
            for t, _ in toks:
                if t == "$end":
                    break
        elif tok == "$timescale":
            parts = []
            for t, _ in toks:
                if t == "$end":
                    break
                parts.append(t)
            timescale = "".join(parts) or timescale
        elif tok == "$scope":
            parts = []
            for t, _ in toks:
                if t == "$end":
                    break
                parts.append(t)
            if len(parts) != 2:
                raise MalformedVcd("$scope expects a type and a name", line)
            scope.append(parts[1])
        elif tok == "$upscope":
            for t, _ in toks:
                if t == "$end":
                    break
            if not scope:
                raise MalformedVcd("$upscope without $scope", line)
            scope.pop()
        elif tok == "$var":
            parts = []
            for t, _ in toks:
                if t == "$end":
                    break
                parts.append(t)
            if len(parts) < 4:
                raise MalformedVcd("$var needs type, size, identifier and reference", line)
            vtype, size, code, ref, *extra = parts
            if vtype == "real":
                raise MalformedVcd("real variables are not supported", line)
            try:
                width = int(size)
            except ValueError:
                raise MalformedVcd(f"bad $var size {size!r}", line) from None
            if not 1 <= width <= 64:
                raise MalformedVcd(f"$var width {width} outside 1..64", line)
            # `ref [3]` names one element; `ref [7:0]` is just the declared range
            if extra and extra[0].startswith("[") and ":" not in extra[0]:
                ref = ref + extra[0]
            # signals are keyed by leaf name; the first declaration wins
            var = vars_by_code.setdefault(code, _Var(code, width, []))
            if ref not in leaf_names:
                leaf_names[ref] = code
                var.names.append(ref)
        elif tok == "$enddefinitions":
            for t, _ in toks:
                if t == "$end":
                    break
            saw_enddefs = True
            break
        else:
            raise MalformedVcd(f"unexpected token {tok!r} in header", line)
    if not saw_enddefs:
        raise MalformedVcd("missing $enddefinitions")

    if clock not in leaf_names:
        raise ClockNotFound(f"clock '{clock}' is not declared in the VCD")
    clk_code = leaf_names[clock]
    if vars_by_code[clk_code].width != 1:
        raise ClockNotFound(f"clock '{clock}' is not a 1-bit variable")

    state: dict[str, int | None] = {code: None for code in vars_by_code}
    edges: list[int] = []
    samples: list[dict[str, int | None]] = []
    group_time: int | None = None
    before: dict[str, int | None] = dict(state)
    last_time = -1

    def close_group():
        if group_time is None:
            return
        if before[clk_code] == 0 and state[clk_code] == 1:
            edges.append(group_time)
            samples.append(before)

    for tok, line in toks:
        c = tok[0]
        if c == "#":
            try:
                t = int(tok[1:])
            except ValueError:
                raise MalformedVcd(f"bad timestamp {tok!r}", line) from None
            if t < last_time:
                raise MalformedVcd("timestamps must not decrease", line)
            if t != group_time:
                close_group()
                group_time = t
                before = dict(state)
            last_time = t
        elif tok in _IGNORED_KEYWORDS:
            continue
        elif c in "01xXzZ":
            code = tok[1:]
            if code not in state:
                raise MalformedVcd(f"unknown identifier code {code!r}", line)
            state[code] = _scalar(c)
        elif c in "bB":
            try:
                code, _ = next(toks)
            except StopIteration:
                raise MalformedVcd("vector change without identifier", line) from None
            if code not in state:
                raise MalformedVcd(f"unknown identifier code {code!r}", line)
            state[code] = _vector(tok[1:], line)
        elif c in "rR":
            raise MalformedVcd("real value changes are not supported", line)
        elif c == "$":
            raise MalformedVcd(f"unsupported keyword {tok!r}", line)
        else:
            raise MalformedVcd(f"unexpected token {tok!r}", line)
        if group_time is None and c != "#":
            # changes before the first timestamp act as initial values
            before = dict(state)
    close_group()

    if not edges:
        raise NoEdges(f"clock '{clock}' never rises")
    values: dict[str, tuple] = {}
    widths: dict[str, int] = {}
    for code, var in vars_by_code.items():
        series = tuple(s[code] for s in samples)
        for visible in var.names:
            values[visible] = series
            widths[visible] = var.width
    return Trace(clock, tuple(edges), values, widths, timescale, name)


# --------------------------------------------------------------------------
# writing


class VcdWriter:
    """Accumulates value changes and renders a VCD document."""

    def __init__(self, timescale: str = "1ns", scope: str = "tb"):
        self.timescale = timescale
        self.scope = scope
        self.vars: dict[str, tuple[str, int]] = {}
        self.changes: dict[int, dict[str, int | None]] = {}

    def declare(self, name: str, width: int = 1):
        code = _code(len(self.vars))
        self.vars[name] = (code, width)

    def change(self, time: int, name: str, value: int | None):
        self.changes.setdefault(time, {})[name] = value

    def _fmt(self, name: str, value: int | None) -> str:
        code, width = self.vars[name]
        if width == 1:
            return f"{'x' if value is None else value & 1}{code}"
        if value is None:
            return f"bx {code}"
        return f"b{value:b} {code}"

    def render(self) -> str:
        out = [f"$timescale {self.timescale} $end", f"$scope module {self.scope} $end"]
        for name, (code, width) in self.vars.items():
            rng = f" [{width - 1}:0]" if width > 1 else ""
            out.append(f"$var wire {width} {code} {name}{rng} $end")
        out += ["$upscope $end", "$enddefinitions $end"]
        current: dict[str, int | None] = {}
        first = True
        for time in sorted(self.changes):
            group = self.changes[time]
            lines = [self._fmt(n, v) for n, v in group.items() if first or current.get(n, "unset") != v]
            current.update(group)
            if first:
                out += [f"#{time}", "$dumpvars"] + lines + ["$end"]
                first = False
            elif lines:
                out.append(f"#{time}")
                out += lines
        return "\n".join(out) + "\n"


def _code(n: int) -> str:
    chars = [chr(c) for c in range(33, 127)]
    s = ""
    n += 1
    while n:
        n, r = divmod(n - 1, len(chars))
        s = chars[r] + s
    return s


def trace_to_vcd(trace: Trace, timescale: str | None = None) -> str:
    """Render ``trace`` so that ``ingest_vcd`` reproduces it exactly.

    Requires edges at least three time units apart, starting at time >= 2.
    """
    times = trace.edge_times
    if times and (times[0] < 2 or any(b - a < 3 for a, b in zip(times, times[1:]))):
        raise ValueError("edges must start at >= 2 and be at least 3 time units apart")
    w = VcdWriter(timescale or trace.timescale)
    names = [trace.clock] + [n for n in trace.values if n != trace.clock]
    for n in names:
        w.declare(n, trace.width(n) if n != trace.clock else 1)
    w.change(0, trace.clock, 0)
    for n in names[1:]:
        w.change(0, n, None)
    for k, t in enumerate(times):
        w.change(t - 2, trace.clock, 0)
        for n in names[1:]:
            w.change(t - 2, n, trace.values[n][k])
        w.change(t, trace.clock, 1)
    return w.render()


def read_vcd_file(path, clock: str) -> Trace:
    """Load a VCD file; the trace is named after the file stem."""
    path = Path(path)
    return ingest_vcd(path.read_text(encoding="utf-8"), clock, name=path.stem)
