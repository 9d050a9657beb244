"""Attempt-by-attempt evaluation of an assertion over a sampled trace.

Every boolean element is compiled once into a closure and tabulated over all
cycles; sequence placements are then explored depth-first with a memo keyed
on (element, cycle) that is shared by all attempts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from ..sva.ast import (
    And,
    Arith,
    AssertionAst,
    Cmp,
    DelayRange,
    Fell,
    Ident,
    Implication,
    IntLit,
    Not,
    Or,
    Past,
    Rose,
    SequenceExpr,
    Stable,
    StrLit,
    referenced_signals,
)
from ..sva.printer import print_sequence
from .model import ClockMismatch, EvalReport, SignalMissingFromTrace, Trace, failure_message

Fn = Callable[[int], "int | None"]
_ZERO = DelayRange(0, 0)


def _truth(v):
    return None if v is None else v != 0


def _to_val(t):
    return None if t is None else int(t)


class _Compiler:
    def __init__(self, trace: Trace):
        self.trace = trace

    def series(self, name: str) -> tuple:
        try:
            return self.trace.values[name]
        except KeyError:
            raise SignalMissingFromTrace(name, self.trace.name) from None

    def compile(self, e) -> Fn:
        method = getattr(self, "_" + type(e).__name__.lower())
        return method(e)

    def _ident(self, e: Ident) -> Fn:
        values = self.trace.values
        if e.index is None:
            s = self.series(e.name)
            return s.__getitem__
        if isinstance(e.index, IntLit) and f"{e.name}[{e.index.value}]" in values:
            return values[f"{e.name}[{e.index.value}]"].__getitem__
        idx = self.compile(e.index)
        base = values.get(e.name)
        width = self.trace.width(e.name)
        name = e.name

        def select(c):
            i = idx(c)
            if i is None or i < 0:
                return None
            element = values.get(f"{name}[{i}]")
            if element is not None:
                return element[c]
            if base is None or i >= width:
                return None
            v = base[c]
            return None if v is None else (v >> i) & 1

        if base is None and not self.trace.has_base(name):
            raise SignalMissingFromTrace(name, self.trace.name)
        return select

    def _intlit(self, e: IntLit) -> Fn:
        v = e.value
        return lambda c: v

    def _strlit(self, e: StrLit) -> Fn:
        v = e.value
        return lambda c: v

    def _not(self, e: Not) -> Fn:
        f = self.compile(e.arg)

        def neg(c):
            v = f(c)
            return None if v is None else int(v == 0)

        return neg

    def _and(self, e: And) -> Fn:
        fs = [self.compile(a) for a in e.args]

        def conj(c):
            unknown = False
            for f in fs:
                v = f(c)
                if v is None:
                    unknown = True
                elif v == 0:
                    return 0
            return None if unknown else 1

        return conj

    def _or(self, e: Or) -> Fn:
        fs = [self.compile(a) for a in e.args]

        def disj(c):
            unknown = False
            for f in fs:
                v = f(c)
                if v is None:
                    unknown = True
                elif v != 0:
                    return 1
            return None if unknown else 0

        return disj

    def _cmp(self, e: Cmp) -> Fn:
        lhs, rhs, op = self.compile(e.lhs), self.compile(e.rhs), e.op
        if op in ("===", "!=="):
            want = op == "==="

            def case_eq(c):
                a, b = lhs(c), rhs(c)
                return int((a == b) == want)

            return case_eq
        test = {
            "==": int.__eq__, "!=": int.__ne__, "<": int.__lt__,
            "<=": int.__le__, ">": int.__gt__, ">=": int.__ge__,
        }[op]

        def compare(c):
            a, b = lhs(c), rhs(c)
            if a is None or b is None:
                return None
            return int(test(a, b))

        return compare

    def _arith(self, e: Arith) -> Fn:
        lhs, rhs = self.compile(e.lhs), self.compile(e.rhs)
        sign = 1 if e.op == "+" else -1

        def arith(c):
            a, b = lhs(c), rhs(c)
            if a is None or b is None:
                return None
            return a + sign * b

        return arith

    def _past(self, e: Past) -> Fn:
        f, n = self.compile(e.arg), e.depth or 1
        return lambda c: f(c - n) if c >= n else None

    def _edge(self, e, now_bit: int) -> Fn:
        f = self.compile(e.arg)

        def edge(c):
            now = f(c)
            now_ok = None if now is None else (now & 1) == now_bit
            prev = f(c - 1) if c >= 1 else None
            prev_ok = None if prev is None else (prev & 1) == 1 - now_bit
            if now_ok is False or prev_ok is False:
                return 0
            if now_ok is None or prev_ok is None:
                return None
            return 1

        return edge

    def _rose(self, e: Rose) -> Fn:
        return self._edge(e, 1)

    def _fell(self, e: Fell) -> Fn:
        return self._edge(e, 0)

    def _stable(self, e: Stable) -> Fn:
        f = self.compile(e.arg)

        def stable(c):
            if c < 1:
                return None
            a, b = f(c), f(c - 1)
            if a is None or b is None:
                return None
            return int(a == b)

        return stable


@dataclass(frozen=True)
class _Outcome:
    """Summary of every placement of a sequence suffix."""

    ends: frozenset  # cycles where some placement matched
    pending: bool  # some placement needs cycles beyond the trace
    max_fail: int  # latest cycle at which a placement failed, -1 if none
    max_decide: int  # latest cycle at which a placement was decided, -1 if none

    def __or__(self, other: "_Outcome") -> "_Outcome":
        return _Outcome(
            self.ends | other.ends,
            self.pending or other.pending,
            max(self.max_fail, other.max_fail),
            max(self.max_decide, other.max_decide),
        )


_PENDING = _Outcome(frozenset(), True, -1, -1)


class _SeqMatcher:
    def __init__(self, seq: SequenceExpr, compiler: _Compiler, cycles: int):
        self.cycles = cycles
        self.holds = []
        for element in seq.elements:
            f = compiler.compile(element)
            self.holds.append([_truth(f(c)) is True for c in range(cycles)])
        self.delays = seq.delays
        self.lead = seq.lead or _ZERO
        self.memo: dict[tuple[int, int], _Outcome] = {}

    def _from(self, i: int, p: int) -> _Outcome:
        if p >= self.cycles:
            return _PENDING
        key = (i, p)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        if not self.holds[i][p]:
            out = _Outcome(frozenset(), False, p, p)
        elif i == len(self.holds) - 1:
            out = _Outcome(frozenset((p,)), False, -1, p)
        else:
            d = self.delays[i]
            out = self._from(i + 1, p + d.lo)
            for off in range(d.lo + 1, d.hi + 1):
                out = out | self._from(i + 1, p + off)
        self.memo[key] = out
        return out

    def start(self, s: int) -> _Outcome:
        out = self._from(0, s + self.lead.lo)
        for off in range(self.lead.lo + 1, self.lead.hi + 1):
            out = out | self._from(0, s + off)
        return out


PASS, FAIL, VACUOUS, INCOMPLETE = "pass", "fail", "vacuous", "incomplete"


def _verdict_implication(ante: _SeqMatcher, cons: _SeqMatcher, shift: int, k: int):
    a = ante.start(k)
    fail_at = None
    cons_pending = False
    latest_match = -1
    for j in a.ends:
        c = cons.start(j + shift)
        if c.ends:
            latest_match = max(latest_match, min(c.ends))
        elif c.pending:
            cons_pending = True
        else:
            fail_at = c.max_fail if fail_at is None else min(fail_at, c.max_fail)
    if fail_at is not None:
        return FAIL, fail_at
    if a.pending or cons_pending:
        return INCOMPLETE, None
    if not a.ends:
        return VACUOUS, a.max_fail
    return PASS, max(a.max_decide, latest_match)


def _verdict_sequence(seq: _SeqMatcher, k: int):
    o = seq.start(k)
    if o.ends:
        return PASS, min(o.ends)
    if o.pending:
        return INCOMPLETE, None
    return FAIL, o.max_fail


def _check_clock(ast: AssertionAst, trace: Trace):
    if ast.clock != trace.clock:
        if ast.clock in trace.values:
            raise ClockMismatch(f"assertion is clocked by {ast.clock} but the trace is sampled on {trace.clock}")
        raise SignalMissingFromTrace(ast.clock, trace.name)


def _unknown_windows(ast: AssertionAst, trace: Trace) -> list[int]:
    """Cycles at which any series read by the assertion is x/z."""
    bad = set()
    for name in referenced_signals(ast):
        keys = [key for key in trace.values if key == name or key.startswith(name + "[")]
        for key in keys:
            bad.update(c for c, v in enumerate(trace.values[key]) if v is None)
    return sorted(bad)


def evaluate(ast: AssertionAst, trace: Trace) -> EvalReport:
    if ast.generate is not None:
        raise ValueError(f"assertion {ast.name} has a generate binding; expand it first")
    _check_clock(ast, trace)
    for name in referenced_signals(ast):
        if not trace.has_base(name):
            raise SignalMissingFromTrace(name, trace.name)

    K = trace.cycles
    compiler = _Compiler(trace)
    disabled_at = [False] * K
    if ast.disable is not None:
        f = compiler.compile(ast.disable)
        disabled_at = [_truth(f(c)) is True for c in range(K)]
    # next_disable[c]: earliest cycle >= c where the disable condition holds
    next_disable = [K] * (K + 1)
    for c in range(K - 1, -1, -1):
        next_disable[c] = c if disabled_at[c] else next_disable[c + 1]
    unknown = _unknown_windows(ast, trace)

    body = ast.body
    if isinstance(body, Implication):
        ante = _SeqMatcher(body.antecedent, compiler, K)
        cons = _SeqMatcher(body.consequent, compiler, K)
        shift = 0 if body.overlapping else 1
        what = print_sequence(body.consequent)

        def verdict(k):
            return _verdict_implication(ante, cons, shift, k)
    else:
        seq = _SeqMatcher(body.seq, compiler, K)
        what = print_sequence(body.seq)

        def verdict(k):
            return _verdict_sequence(seq, k)

    counts = {PASS: 0, FAIL: 0, VACUOUS: 0, INCOMPLETE: 0, "disabled": 0}
    fail_cycles: list[int] = []
    unknown_fails = 0
    message = None
    for k in range(K):
        status, r = verdict(k)
        last = K - 1 if r is None else r
        if next_disable[k] <= last:
            counts["disabled"] += 1
            continue
        counts[status] += 1
        if status == FAIL:
            fail_cycles.append(r)
            if any(k <= c <= r for c in unknown):
                unknown_fails += 1
            if message is None:
                message = failure_message(ast.name, what, r, k, trace.edge_times[r], trace.name)
    return EvalReport(
        assertion_name=ast.name,
        attempts=K,
        passes=counts[PASS],
        fails=counts[FAIL],
        vacuous=counts[VACUOUS],
        disabled=counts["disabled"],
        incomplete=counts[INCOMPLETE],
        fail_cycles=tuple(fail_cycles),
        unknown_fails=unknown_fails,
        first_failure_message=message,
    )
