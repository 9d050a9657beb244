import random
import xml.etree.ElementTree as ET

import pytest

from randgen import rand_assertion, rand_trace
from svaflow import rvtimer
from svaflow.sva import (
    AssertionAst,
    Cmp,
    Ident,
    Implication,
    IntLit,
    Not,
    Or,
    SeqProp,
    SequenceExpr,
    parse_assertions,
)
from svaflow.trace import (
    ClockMismatch,
    ClockNotFound,
    EvalReport,
    InstanceTooLarge,
    MalformedVcd,
    NoEdges,
    SignalMissingFromTrace,
    Trace,
    evaluate,
    ingest_vcd,
    junit_xml,
    oracle_evaluate,
    trace_to_vcd,
)

MINIMAL = """\
$timescale 1ns $end
$scope module tb $end
$var wire 1 ! clk $end
$var wire 1 " active $end
$var wire 4 # tick_count [3:0] $end
$var wire 1 $ rst_ni $end
$upscope $end
$enddefinitions $end
#0
$dumpvars
0!
1"
b0 #
x$
$end
#5
1!
b11 #
#10
0!
1$
#15
1!
#20
0!
#25
1!
bx #
#30
0!
#35
1!
"""


def test_minimal_vcd():
    t = ingest_vcd(MINIMAL, "clk")
    assert t.cycles == 4 and t.edge_times == (5, 15, 25, 35)
    assert t.values["active"] == (1, 1, 1, 1)
    # change at the edge's own timestamp is seen at the next edge
    assert t.values["tick_count"] == (0, 3, 3, None)
    assert t.values["rst_ni"] == (None, 1, 1, 1)
    assert t.width("tick_count") == 4


def test_vcd_errors():
    with pytest.raises(ClockNotFound):
        ingest_vcd(MINIMAL, "clk_i")
    with pytest.raises(ClockNotFound):
        ingest_vcd(MINIMAL, "tick_count")
    with pytest.raises(NoEdges):
        ingest_vcd(MINIMAL.split("#5")[0], "clk")
    bad = MINIMAL.replace("b11 #", "b12 #")
    with pytest.raises(MalformedVcd) as exc:
        ingest_vcd(bad, "clk")
    assert exc.value.line == 18


def test_trace_vcd_round_trip():
    rng = random.Random(4)
    for _ in range(50):
        t = rand_trace(rng)
        t = Trace(t.clock, tuple(10 * (i + 1) for i in range(t.cycles)), t.values, t.widths)
        back = ingest_vcd(trace_to_vcd(t), "clk")
        assert (back.edge_times, back.values) == (t.edge_times, t.values)
        assert all(back.width(n) == t.width(n) for n in t.values)


def test_fixture_vcds_match_model(rv_dir):
    for stim in rvtimer.fixture_stimuli():
        assert (rv_dir / f"{stim.name}.vcd").read_text() == rvtimer.simulate_vcd(stim)


def test_model_rows():
    rows = rvtimer.simulate_rows(rvtimer.Stimulus([0, 1, 1, 1, 1, 1], [1] * 6, prescaler=1, step=2, mtimecmp=(2,)))
    assert [r["tick_count"] for r in rows] == [0, 0, 1, 0, 1, 0]
    assert [r["tick"] for r in rows] == [0, 0, 1, 0, 1, 0]
    assert [r["mtime"] for r in rows] == [0, 0, 0, 2, 2, 4]
    assert [r["intr"] for r in rows] == [0, 0, 0, 1, 1, 1]
    assert all(r["mtime_d"] == r["mtime"] + 2 for r in rows)


def parse1(src):
    asts, diags = parse_assertions(src)
    assert not [d for d in diags if d.is_error]
    return asts[0]


MOD1 = parse1("property m; @(posedge clk) disable iff (!rst_ni) !active |-> ##1 tick_count == 0; endproperty "
              "assert property(m);")
RAW1 = parse1("property r; @(posedge clk) disable iff (!rst_ni) !active |-> tick_count == 0; endproperty "
              "assert property(r);")


def test_modified_assertion_1_example():
    t = Trace.from_columns({"rst_ni": [1] * 5, "active": [1, 1, 0, 1, 1], "tick_count": [1, 2, 3, 0, 1]})
    r = evaluate(MOD1, t)
    assert (r.passes, r.vacuous, r.fails) == (1, 4, 0)


def test_raw_assertion_1_fails_when_clear_lags():
    t = Trace.from_columns({"rst_ni": [1] * 5, "active": [1, 1, 0, 1, 1], "tick_count": [1, 2, 3, 0, 1]})
    r = evaluate(RAW1, t)
    assert r.fails == 1 and r.fail_cycles == (2,)
    assert "cycle 2" in r.first_failure_message and "tick_count == 0" in r.first_failure_message


def test_always_disabled():
    t = Trace.from_columns({"rst_ni": [0] * 6, "active": [0, 1, 0, 1, 0, 1], "tick_count": [0] * 6})
    for ast in (MOD1, RAW1):
        r = evaluate(ast, t)
        assert r.disabled == r.attempts == 6


def test_tautology_and_contradiction():
    rng = random.Random(0)
    one, zero = SequenceExpr((IntLit(1),)), SequenceExpr((IntLit(0),))
    for _ in range(20):
        t = rand_trace(rng)
        taut = evaluate(AssertionAst("t", "clk", Implication(one, True, one)), t)
        contra = evaluate(AssertionAst("c", "clk", Implication(one, True, zero)), t)
        assert taut.passes == taut.attempts - taut.incomplete
        assert contra.fails == contra.attempts - contra.incomplete


def test_incomplete_at_end():
    ast = parse1("assert property (@(posedge clk) a |=> b);")
    r = evaluate(ast, Trace.from_columns({"a": [1, 1, 1], "b": [1, 1, 1]}))
    assert (r.passes, r.incomplete) == (2, 1)


def test_unknown_consequent_fails_and_is_counted():
    ast = parse1("assert property (@(posedge clk) a |-> b);")
    r = evaluate(ast, Trace.from_columns({"a": [1, 1], "b": [1, None]}))
    assert r.fails == 1 and r.unknown_fails == 1


def test_missing_signal_and_clock():
    ast = parse1("assert property (@(posedge clk) a |-> zz);")
    t = Trace.from_columns({"a": [1], "b": [0]})
    with pytest.raises(SignalMissingFromTrace, match="zz"):
        evaluate(ast, t)
    other = parse1("assert property (@(posedge b) a |-> a);")
    with pytest.raises(ClockMismatch):
        evaluate(other, t)


def test_generate_must_be_expanded(rv_traces):
    ast = parse1("generate for (genvar t = 0; t < 2; t++) begin : g\n"
                 "assert property (@(posedge clk_i) intr[t] |-> 1);\nend endgenerate")
    with pytest.raises(ValueError):
        evaluate(ast, rv_traces[0])


def test_oracle_examples_and_limits():
    t = Trace.from_columns({"rst_ni": [1] * 5, "active": [1, 1, 0, 1, 1], "tick_count": [1, 2, 3, 0, 1]})
    assert oracle_evaluate(MOD1, t) == evaluate(MOD1, t)
    assert oracle_evaluate(RAW1, t) == evaluate(RAW1, t)
    with pytest.raises(InstanceTooLarge):
        oracle_evaluate(MOD1, Trace.from_columns({"rst_ni": [1] * 9, "active": [1] * 9, "tick_count": [0] * 9}))


def test_evaluator_matches_oracle_sample():
    rng = random.Random(99)
    for _ in range(2000):
        a, t = rand_assertion(rng, depth=3), rand_trace(rng)
        assert evaluate(a, t) == oracle_evaluate(a, t)


def test_count_conservation_and_disable_monotonicity():
    rng = random.Random(21)
    for _ in range(1000):
        a, t = rand_assertion(rng), rand_trace(rng)
        r = evaluate(a, t)
        assert r.attempts == t.cycles
        extra = Ident(rng.choice(("a", "b")))
        stronger = AssertionAst(a.name, a.clock, a.body, extra if a.disable is None else Or((a.disable, extra)))
        s = evaluate(stronger, t)
        assert s.passes + s.fails <= r.passes + r.fails
        assert evaluate(a, t) == r


def test_report_invariants():
    with pytest.raises(ValueError):
        EvalReport("x", attempts=2, passes=1)
    with pytest.raises(ValueError):
        EvalReport("x", attempts=1, fails=1)
    a = EvalReport("x", 2, 1, 1, fail_cycles=(3,), first_failure_message="m")
    b = EvalReport("x", 1, 0, 0, 1)
    m = EvalReport.merge("x", [a, b])
    assert (m.attempts, m.passes, m.fails, m.vacuous) == (3, 1, 1, 1)
    assert EvalReport.from_dict(m.to_dict()) == m


def test_junit():
    reps = [EvalReport("ok", 2, 2), EvalReport("bad", 1, 0, 1, fail_cycles=(0,), first_failure_message="boom")]
    root = ET.fromstring(junit_xml(reps))
    assert root.get("tests") == "2" and root.get("failures") == "1"
    assert root.find(".//failure").get("message") == "boom"


def test_seqprop_and_not():
    ast = AssertionAst("s", "clk", SeqProp(SequenceExpr((Not(Cmp("==", Ident("a"), IntLit(1))),))))
    r = evaluate(ast, Trace.from_columns({"a": [0, 1, None]}))
    assert (r.passes, r.fails, r.unknown_fails) == (1, 2, 1)
