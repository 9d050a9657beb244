"""One test per acceptance criterion; each records a PASS/FAIL line for the run summary."""

import contextlib
import random
import time
from pathlib import Path

from conftest import ACCEPTANCE_LINES, CORPUS, DATA
from randgen import rand_assertion, rand_trace
from svaflow.cli import main
from svaflow.compare import BEHAVIORAL, load_assertions, match_sets
from svaflow.orchestrator import FeedbackPayload, build_prompt, strip_timestamps
from svaflow.orchestrator.session import read_log
from svaflow.rvtimer import probe_traces
from svaflow.sva import check_semantics, parse_assertions, pretty_print
from svaflow.trace import Trace, evaluate, oracle_evaluate, read_vcd_file
from svaflow.verilog import extract_signals
from session_util import run_rv_timer

import test_compare
import test_sva
import test_trace


@contextlib.contextmanager
def criterion(n: int, what: str):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        ACCEPTANCE_LINES.append(f"FAIL  criterion {n}: {what}")
        raise
    ACCEPTANCE_LINES.append(f"PASS  criterion {n}: {what} ({time.perf_counter() - start:.2f}s)")


def corpus(name):
    asts, diags = parse_assertions((CORPUS / name).read_text())
    return asts, diags


def test_1_corpus_parse_coverage():
    with criterion(1, "corpus listings parse without errors and round-trip"):
        start = time.perf_counter()
        names = []
        for path in sorted(CORPUS.glob("*.sva")):
            asts, diags = corpus(path.name)
            assert not [d for d in diags if d.is_error], (path.name, diags)
            for a in asts:
                again, d2 = parse_assertions(pretty_print(a))
                assert not [d for d in d2 if d.is_error] and again == [a], path.name
            names += [a.name for a in asts]
        assert len(names) == 18
        assert {"p_correctness", "p_consistency1", "p_consistency2", "tick_count_reset", "tick_generate",
                "tick_count_increment", "tick_count_prescaler", "update_mtime_d", "mtime_exceed",
                "interrupt_assert", "HMAC_process_start", "Checker_done", "Counter_done",
                "Current_state"} == set(names)
        assert time.perf_counter() - start < 1.0


def test_2_evaluator_oracle_equivalence():
    with criterion(2, "evaluate == oracle_evaluate on 10,000 random instances"):
        start = time.perf_counter()
        rng = random.Random(2024)
        disagreements = 0
        for _ in range(10_000):
            a, t = rand_assertion(rng, depth=3), rand_trace(rng, max_cycles=6)
            disagreements += evaluate(a, t) != oracle_evaluate(a, t)
        assert disagreements == 0
        assert time.perf_counter() - start < 60


def test_3_repair_trajectories(tmp_path):
    with criterion(3, "replay session: iterations 1/3/0 and 7 passing assertions"):
        start = time.perf_counter()
        s = run_rv_timer(tmp_path / "session.jsonl")
        it = {n: st.iterations_used for n, st in s.assertions.items()}
        assert (it["tick_count_reset"], it["tick_generate"], it["tick_count_increment"]) == (1, 3, 0)
        assert all(st.status == "passing" for st in s.assertions.values())
        assert len(s.passing()) == 7
        assert time.perf_counter() - start < 10


def test_4_failure_mode_fidelity():
    with criterion(4, "raw vs modified Assertions 1 and 2 behave as reported"):
        raw = {a.name: a for a in corpus("rv_timer_raw_1_3.sva")[0]}
        mod1 = corpus("rv_timer_modified_1.sva")[0][0]
        mod2 = corpus("rv_timer_modified_2.sva")[0][0]
        # tick_count clears one cycle after active falls
        t = Trace.from_columns(
            {"clk_i": [0] * 6, "rst_ni": [1] * 6, "active": [1, 1, 0, 1, 1, 1], "tick_count": [0, 1, 2, 0, 1, 2],
             "prescaler": [5] * 6, "tick": [0] * 6},
            clock="clk_i",
        )
        r_raw, r_mod = evaluate(raw["tick_count_reset"], t), evaluate(mod1, t)
        assert r_raw.fails >= 1 and r_raw.fail_cycles == (2,)
        assert r_mod.fails == 0 and r_mod.passes >= 1
        # tick only rises in the same cycle the count reaches the prescaler
        t2 = Trace.from_columns(
            {"clk_i": [0] * 6, "rst_ni": [1] * 6, "active": [1] * 6, "tick_count": [0, 1, 0, 1, 0, 1],
             "prescaler": [1] * 6, "tick": [0, 1, 0, 1, 0, 1]},
            clock="clk_i",
        )
        a, b = evaluate(raw["tick_generate"], t2), evaluate(mod2, t2)
        assert (a.passes, a.fails) != (b.passes, b.fails)
        assert a.fails > 0 and b.fails == 0
        # the same split shows on the bundled fixture trace
        tb = read_vcd_file(DATA / "tb_count.vcd", "clk_i")
        assert evaluate(raw["tick_count_reset"], tb).fails > 0 and evaluate(mod1, tb).fails == 0
        assert evaluate(raw["tick_generate"], tb).fails > 0 and evaluate(mod2, tb).fails == 0


def test_5_commonality_mechanism(tmp_path):
    with criterion(5, "Assertions 11/12 match behaviorally; curated 7 vs 11 sets share 5"):
        probes = probe_traces(count=24, cycles=12, seed=7)
        count, pairs = match_sets(load_assertions(CORPUS / "compare_11.sva"),
                                  load_assertions(CORPUS / "compare_12.sva"), probes)
        assert count == 1 and pairs[0].kind == BEHAVIORAL and pairs[0].label == "probe-consistent"
        s = run_rv_timer(tmp_path / "s.jsonl")
        alt = load_assertions(DATA / "alt_assertions.sva")
        assert (len(s.passing()), len(alt)) == (7, 11)
        count, _ = match_sets(s.passing(), alt, probes, {"N": 2})
        assert count == 5
        assert match_sets(alt, s.passing(), probes, {"N": 2})[0] == 5


def test_6_signal_synchronization():
    with criterion(6, "UnknownSignal for unsynchronized names, quoted verbatim in the repair prompt"):
        inv = extract_signals(
            "module hmac(input clk, input rst_n, input msg_fifo_req, input hmac_en, output reg_hash_start);"
            " endmodule"
        )
        hmac_text = (CORPUS / "hmac.sva").read_text()
        asts, parse_diags = parse_assertions(hmac_text)
        diags = check_semantics(asts[0], inv)
        unknown = {d.message.split("'")[1] for d in diags if d.code == "UnknownSignal"}
        assert {"msg_fifo_reqq", "hmac_ena", "reg_hash_startt", "rstt_n"} <= unknown
        prompt = build_prompt("error_feedback", "hmac",
                              FeedbackPayload(asts[0].name, hmac_text, 1, parse_diags + diags))
        for d in diags:
            if d.is_error:
                assert str(d) in prompt.body


def test_7_determinism(tmp_path):
    with criterion(7, "two replay runs give identical logs, report.md and iterations.csv"):
        outs = []
        for run in ("a", "b"):
            gen, rep = tmp_path / run / "gen", tmp_path / run / "rep"
            assert main(["gen", "--config", str(DATA / "session.toml"), "--out", str(gen)]) == 0
            assert main(["report", "--session", str(gen / "session.jsonl"), "--out", str(rep)]) == 0
            outs.append((gen, rep))
        (ga, ra), (gb, rb) = outs
        assert [strip_timestamps(r) for r in read_log(ga / "session.jsonl")] == [
            strip_timestamps(r) for r in read_log(gb / "session.jsonl")]
        for name in ("report.md", "iterations.csv", "report.csv"):
            assert Path(ra, name).read_bytes() == Path(rb, name).read_bytes()


def test_8_property_suite():
    with criterion(8, "property suite: normalize, conservation, disable monotonicity, symmetry"):
        test_sva.test_normalize_idempotent_and_semantics_preserving()
        test_sva.test_round_trip_fuzzed_asts()
        test_trace.test_count_conservation_and_disable_monotonicity()
        test_compare.test_symmetry_and_behavioral_exactness()
