"""Brute-force reference evaluator for small instances.

Written straight from the attempt semantics: enumerate every placement of
every sequence, then grow the visible prefix of the trace one cycle at a time
until the attempt's verdict stops being open. Slow on purpose, and shares no
code with :mod:`svaflow.trace.evaluate`.
"""

from __future__ import annotations

import itertools

from ..sva import ast as A
from ..sva.printer import print_sequence
from .model import ClockMismatch, EvalReport, InstanceTooLarge, SignalMissingFromTrace, Trace, failure_message

MAX_CYCLES = 8
MAX_DELAY = 4
MAX_SIGNALS = 4


def _lookup(trace: Trace, name: str, index, c: int):
    if index is None:
        if name not in trace.values:
            raise SignalMissingFromTrace(name, trace.name)
        return trace.values[name][c]
    i = _value(trace, index, c)
    if i is None or i < 0:
        return None
    key = f"{name}[{i}]"
    if key in trace.values:
        return trace.values[key][c]
    if name not in trace.values or i >= trace.width(name):
        return None
    v = trace.values[name][c]
    if v is None:
        return None
    return 1 if v & (1 << i) else 0


def _value(trace: Trace, e, c: int):
    """Value of ``e`` at cycle ``c``; None for unknown."""
    if isinstance(e, A.Ident):
        return _lookup(trace, e.name, e.index, c)
    if isinstance(e, (A.IntLit, A.StrLit)):
        return e.value
    if isinstance(e, A.Not):
        t = _tv(trace, e.arg, c)
        return None if t is None else (0 if t else 1)
    if isinstance(e, A.And):
        ts = [_tv(trace, a, c) for a in e.args]
        if False in ts:
            return 0
        return None if None in ts else 1
    if isinstance(e, A.Or):
        ts = [_tv(trace, a, c) for a in e.args]
        if True in ts:
            return 1
        return None if None in ts else 0
    if isinstance(e, A.Cmp):
        a, b = _value(trace, e.lhs, c), _value(trace, e.rhs, c)
        if e.op == "===":
            return 1 if a == b else 0
        if e.op == "!==":
            return 0 if a == b else 1
        if a is None or b is None:
            return None
        result = {
            "==": a == b, "!=": a != b, "<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b,
        }[e.op]
        return 1 if result else 0
    if isinstance(e, A.Arith):
        a, b = _value(trace, e.lhs, c), _value(trace, e.rhs, c)
        if a is None or b is None:
            return None
        return a + b if e.op == "+" else a - b
    if isinstance(e, A.Past):
        d = 1 if e.depth is None else e.depth
        return None if c - d < 0 else _value(trace, e.arg, c - d)
    if isinstance(e, (A.Rose, A.Fell)):
        want_now = 1 if isinstance(e, A.Rose) else 0
        now = _value(trace, e.arg, c)
        before = None if c == 0 else _value(trace, e.arg, c - 1)
        now_bit = None if now is None else now % 2
        before_bit = None if before is None else before % 2
        if now_bit is not None and now_bit != want_now:
            return 0
        if before_bit is not None and before_bit == want_now:
            return 0
        if now_bit is None or before_bit is None:
            return None
        return 1
    if isinstance(e, A.Stable):
        if c == 0:
            return None
        now, before = _value(trace, e.arg, c), _value(trace, e.arg, c - 1)
        if now is None or before is None:
            return None
        return 1 if now == before else 0
    raise TypeError(f"unexpected node {e!r}")


def _tv(trace, e, c):
    v = _value(trace, e, c)
    return None if v is None else v != 0


def _placements(seq: A.SequenceExpr, start: int) -> list[list[int]]:
    """Cycle of each element, for every choice of lead and delay offsets."""
    lead = seq.lead or A.DelayRange(0, 0)
    ranges = [range(lead.lo, lead.hi + 1)] + [range(d.lo, d.hi + 1) for d in seq.delays]
    out = []
    for offsets in itertools.product(*ranges):
        cycles, t = [], start
        for off in offsets:
            t += off
            cycles.append(t)
        out.append(cycles)
    return out


def _status(trace, seq, cycles, bound):
    """('match', end) | ('fail', cycle) | ('open', None) with only cycles < bound visible."""
    for e, c in zip(seq.elements, cycles):
        if c >= bound:
            return "open", None
        if _tv(trace, e, c) is not True:
            return "fail", c
    return "match", cycles[-1]


def _seq_state(trace, seq, start, bound):
    stats = [_status(trace, seq, p, bound) for p in _placements(seq, start)]
    if any(s == "match" for s, _ in stats):
        return "match", [t for s, t in stats if s == "match"]
    if any(s == "open" for s, _ in stats):
        return "open", []
    return "fail", []


def _verdict_at(trace, body, k, bound):
    if isinstance(body, A.SeqProp):
        state, _ = _seq_state(trace, body.seq, k, bound)
        return {"match": "pass", "open": "incomplete", "fail": "fail"}[state]
    ante = [_status(trace, body.antecedent, p, bound) for p in _placements(body.antecedent, k)]
    ends = sorted({t for s, t in ante if s == "match"})
    shift = 0 if body.overlapping else 1
    cons = [_seq_state(trace, body.consequent, j + shift, bound)[0] for j in ends]
    if "fail" in cons:
        return "fail"
    if "open" in cons or any(s == "open" for s, _ in ante):
        return "incomplete"
    if not ends:
        return "vacuous"
    return "pass"


def _check_size(ast: A.AssertionAst, trace: Trace):
    if trace.cycles > MAX_CYCLES:
        raise InstanceTooLarge(f"trace has {trace.cycles} cycles (limit {MAX_CYCLES})")
    for seq in A.sequences(ast.body):
        for d in ((seq.lead,) if seq.lead else ()) + seq.delays:
            if d.hi > MAX_DELAY:
                raise InstanceTooLarge(f"delay bound {d.hi} exceeds {MAX_DELAY}")
    if len(A.referenced_signals(ast)) > MAX_SIGNALS:
        raise InstanceTooLarge(f"more than {MAX_SIGNALS} signals referenced")


def oracle_evaluate(ast: A.AssertionAst, trace: Trace) -> EvalReport:
    if ast.generate is not None:
        raise ValueError(f"assertion {ast.name} has a generate binding; expand it first")
    _check_size(ast, trace)
    if ast.clock != trace.clock:
        if ast.clock in trace.values:
            raise ClockMismatch(f"assertion clock {ast.clock} differs from trace clock {trace.clock}")
        raise SignalMissingFromTrace(ast.clock, trace.name)
    names = A.referenced_signals(ast)
    for name in names:
        if name not in trace.values and not any(key.startswith(name + "[") for key in trace.values):
            raise SignalMissingFromTrace(name, trace.name)

    K = trace.cycles
    body = ast.body
    target = body.consequent if isinstance(body, A.Implication) else body.seq
    tally = {"pass": 0, "fail": 0, "vacuous": 0, "incomplete": 0, "disabled": 0}
    fail_cycles = []
    unknown_fails = 0
    message = None
    for k in range(K):
        verdict, resolved = "incomplete", None
        for bound in range(k + 1, K + 1):
            verdict = _verdict_at(trace, body, k, bound)
            if verdict != "incomplete":
                resolved = bound - 1
                break
        window = range(k, (K - 1 if resolved is None else resolved) + 1)
        if ast.disable is not None and any(_tv(trace, ast.disable, c) is True for c in window):
            tally["disabled"] += 1
            continue
        tally[verdict] += 1
        if verdict == "fail":
            fail_cycles.append(resolved)
            touched = [key for key in trace.values if any(key == n or key.startswith(n + "[") for n in names)]
            if any(trace.values[key][c] is None for key in touched for c in window):
                unknown_fails += 1
            if message is None:
                message = failure_message(
                    ast.name, print_sequence(target), resolved, k, trace.edge_times[resolved], trace.name
                )
    return EvalReport(
        assertion_name=ast.name,
        attempts=K,
        passes=tally["pass"],
        fails=tally["fail"],
        vacuous=tally["vacuous"],
        disabled=tally["disabled"],
        incomplete=tally["incomplete"],
        fail_cycles=tuple(fail_cycles),
        unknown_fails=unknown_fails,
        first_failure_message=message,
    )
