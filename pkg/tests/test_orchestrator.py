import json
import os

import httpx
import pytest

from session_util import DATA, run_rv_timer
from svaflow.diagnostics import Diagnostic
from svaflow.orchestrator import (
    BackendUnavailable,
    ConfigError,
    ContextOverflow,
    FeedbackPayload,
    FixturesExhausted,
    HttpBackend,
    HttpSettings,
    LlmResponse,
    PayloadMismatch,
    PromptRecord,
    ReplayBackend,
    ResumeMismatch,
    SessionAborted,
    SessionConfig,
    build_prompt,
    check_assertion,
    classify_failure,
    extract_sva,
    load_config,
    load_session,
    reference_expects_pass,
    strip_timestamps,
)
from svaflow.orchestrator.config import config_from_dict
from svaflow.orchestrator.session import AssertionState, SessionError, read_log
from svaflow.sva import parse_assertions
from svaflow.trace import EvalReport


# --------------------------------------------------------------------------
# config


def test_config_defaults_and_validation(tmp_path):
    cfg = SessionConfig()
    assert cfg.max_iterations == 5 and cfg.backend == "replay" and not cfg.interactive_confirm
    with pytest.raises(ConfigError):
        SessionConfig(max_iterations=0)
    with pytest.raises(ConfigError):
        SessionConfig(backend="carrier-pigeon")
    with pytest.raises(ConfigError):
        config_from_dict({"max_iter": 3})
    with pytest.raises(ConfigError):
        config_from_dict({"max_iterations": "3"})
    bad = tmp_path / "bad.toml"
    bad.write_text("max_iterations = [")
    with pytest.raises(ConfigError):
        load_config(bad)


def test_bundled_config(rv_config):
    assert rv_config.design == "rv_timer"
    assert rv_config.replay_dir == DATA / "replay"
    assert rv_config.parameters == {"N": 2}
    assert [p.name for p in rv_config.traces] == ["tb_count.vcd", "tb_intr.vcd"]
    assert config_from_dict({k: v for k, v in rv_config.to_dict().items() if v is not None}) == rv_config


# --------------------------------------------------------------------------
# prompts


def test_prompt_record_invariants():
    with pytest.raises(ValueError):
        PromptRecord("error_feedback", "x", 0)
    with pytest.raises(ValueError):
        PromptRecord("spec", "x", 1)
    assert PromptRecord("context_seed", "x").role == "system"


def test_build_prompt_stages(rv_rtl):
    sync = build_prompt("verilog_sync", "rv_timer", rv_rtl)
    assert rv_rtl.strip() in sync.body and "exact names declared in this RTL" in sync.body
    with pytest.raises(PayloadMismatch):
        build_prompt("spec", "rv_timer", "")
    with pytest.raises(PayloadMismatch):
        build_prompt("verilog_sync", "rv_timer", "no verilog here")
    with pytest.raises(PayloadMismatch):
        build_prompt("error_feedback", "rv_timer", "text")
    assert build_prompt("spec", "d", "spec") == build_prompt("spec", "d", "spec")


def test_error_feedback_embeds_failure():
    report = EvalReport("tick_count_reset", 3, 1, 1, 1, fail_cycles=(13,),
                        first_failure_message="Assertion tick_count_reset failed at cycle 13 (time 135): ...")
    text = "property tick_count_reset; ... endproperty"
    p = build_prompt("error_feedback", "rv_timer", FeedbackPayload("tick_count_reset", text, 1, (), report))
    assert text in p.body and report.first_failure_message in p.body and "13" in p.body
    assert p.iteration == 1 and p.subject == "tick_count_reset"


# --------------------------------------------------------------------------
# backends


def test_replay_backend(tmp_path):
    (tmp_path / "001_response.txt").write_text("second")
    (tmp_path / "000_response.txt").write_text("first")
    b = ReplayBackend(tmp_path)
    assert [b.complete([]), b.complete([])] == ["first", "second"]
    with pytest.raises(FixturesExhausted):
        b.complete([])
    empty = tmp_path / "empty"
    empty.mkdir()
    with pytest.raises(FixturesExhausted):
        ReplayBackend(empty).complete([])


def test_first_replay_fixture_holds_raw_assertions():
    b = ReplayBackend(DATA / "replay")
    b.skip(2)  # spec and block-diagram replies come first
    asts, _ = parse_assertions(extract_sva(b.complete([]))[0])
    assert [a.name for a in asts][:3] == ["tick_count_reset", "tick_generate", "tick_count_increment"]
    assert len(asts) == 7


def test_http_backend_without_credential(monkeypatch):
    monkeypatch.delenv("SVAFLOW_API_KEY", raising=False)

    def boom(request):  # pragma: no cover - must never be reached
        raise AssertionError("network used")

    with pytest.raises(BackendUnavailable):
        HttpBackend(HttpSettings(), transport=httpx.MockTransport(boom))


def test_http_backend_request_shape(monkeypatch):
    monkeypatch.setenv("SVAFLOW_API_KEY", "k")
    seen = {}

    def handler(request):
        seen["auth"] = request.headers["authorization"]
        seen["body"] = json.loads(request.content)
        return httpx.Response(200, json={"choices": [{"message": {"content": "hello"}}]})

    b = HttpBackend(HttpSettings(model="m"), transport=httpx.MockTransport(handler))
    msgs = [{"role": "system", "content": "s"}, {"role": "user", "content": "u"}]
    assert b.complete(msgs) == "hello"
    assert seen["auth"] == "Bearer k"
    assert seen["body"] == {"model": "m", "messages": msgs, "temperature": 0.0}

    fail = HttpBackend(HttpSettings(), transport=httpx.MockTransport(lambda r: httpx.Response(401)))
    with pytest.raises(BackendUnavailable):
        fail.complete(msgs)


def test_llm_response_substring_invariant():
    with pytest.raises(ValueError):
        LlmResponse("abc", ("abd",), "x")


# --------------------------------------------------------------------------
# extraction and classification


def test_extract_fenced():
    raw = "Here:\n```systemverilog\nproperty p; @(posedge c) a; endproperty\n```\nthanks"
    assert extract_sva(raw) == ["property p; @(posedge c) a; endproperty\n"]


def test_extract_unfenced_two_blocks():
    raw = ("Assertion 1 checks the reset.\nproperty a1;\n(@(posedge clk_i) x |-> y);\nend property\n"
           "assert property(a1);\n\nAnd another one:\nproperty a2;\n@(posedge clk_i) y;\nendproperty\n"
           "assert property(a2);\nThat is all.")
    blocks = extract_sva(raw)
    assert len(blocks) == 2 and all(b in raw for b in blocks)
    assert blocks[0].rstrip().endswith("assert property(a1);")
    assert extract_sva("Just prose, no code at all.") == []


def diag(code, sev="error"):
    return Diagnostic(sev, code, "m", (0, 1))


def test_classify_failure():
    passing = EvalReport("p", 2, 1, 0, 1)
    failing = EvalReport("p", 2, 1, 1, fail_cycles=(0,))
    assert classify_failure([diag("SpacedEndproperty", "warning")], passing) == "clean"
    assert classify_failure([diag("SyntaxError"), diag("UnknownSignal")]) == "syntax"
    assert classify_failure([diag("UnknownSignal")]) == "unknown_signal"
    assert classify_failure([], failing) == "semantic_fail"
    assert classify_failure([], failing, reference_expects_pass=True) == "suspected_design_bug"
    assert classify_failure([], EvalReport("p", 2, 0, 0, 2)) == "semantic_fail"


def test_reference_expects_pass():
    a, _ = parse_assertions("assert property (@(posedge clk) x && y |=> z);")
    b, _ = parse_assertions("property other; @(posedge clk) (y && x) |-> ##1 z; endproperty assert property(other);")
    c, _ = parse_assertions("assert property (@(posedge clk) x |-> z);")
    assert reference_expects_pass(a[0], b) and not reference_expects_pass(c[0], b)
    assert not reference_expects_pass(a[0], [])


def test_status_transitions():
    s = AssertionState("x", "", None)
    with pytest.raises(SessionError):
        s.move_to("abandoned")
    s.move_to("failing")
    s.move_to("passing")
    with pytest.raises(SessionError):
        s.move_to("failing")


def test_check_assertion_signal_missing(rv_inventory, rv_traces):
    ast = parse_assertions("assert property (@(posedge clk_i) active |-> hidden_sig);")[0][0]
    diags, report = check_assertion(ast, rv_inventory, rv_traces, {"N": 2})
    assert [d.code for d in diags] == ["UnknownSignal"]


# --------------------------------------------------------------------------
# sessions


@pytest.fixture(scope="module")
def session_run(tmp_path_factory):
    log = tmp_path_factory.mktemp("s") / "session.jsonl"
    return run_rv_timer(log), log


def test_session_trajectories(session_run):
    s, _ = session_run
    iters = {n: st.iterations_used for n, st in s.assertions.items()}
    assert iters == {"tick_count_reset": 1, "tick_generate": 3, "tick_count_increment": 0,
                     "tick_count_prescaler": 0, "update_mtime_d": 0, "mtime_exceed": 0, "interrupt_assert": 1}
    assert all(st.status == "passing" for st in s.assertions.values())
    assert len(s.passing()) == 7 and s.completed


def test_session_invariants(session_run, rv_traces):
    s, _ = session_run
    stages = [p.stage for p, _ in s.history]
    assert stages[:3] == ["spec", "block_diagram", "verilog_sync"]
    assert stages.count("error_feedback") == s.total_iterations() == 5
    assert s.system_prompt.stage == "context_seed"
    for st in s.assertions.values():
        assert st.status != "raw" and st.iterations_used <= s.config.max_iterations
        diags, report = check_assertion(st.ast, s.inventory, rv_traces, {"N": 2})
        assert report.fails == 0 and report.passes >= 1
    # each repair prompt quotes the assertion text the previous response produced
    for k, (prompt, _) in enumerate(s.history):
        if prompt.stage == "error_feedback" and prompt.iteration > 1:
            prev_raw = s.history[k - 1][1].raw
            assert any(line.strip() and line.strip() in prev_raw for line in prompt.body.splitlines())


def test_session_log_contents(session_run):
    s, log = session_run
    records = read_log(log)
    assert records[0]["type"] == "session" and records[-1]["type"] == "end"
    assert all(r["schema"] == 1 and "ts" in r for r in records)
    assert sum(r["type"] == "response" for r in records) == len(s.history) == 8
    loaded = load_session(log)
    assert {n: (x.status, x.iterations_used) for n, x in loaded.assertions.items()} == {
        n: (x.status, x.iterations_used) for n, x in s.assertions.items()}
    assert loaded.passing() == s.passing() and loaded.completed
    assert loaded.trace_span() == s.trace_span() == 230


def test_replay_determinism(session_run, tmp_path):
    _, log = session_run
    run_rv_timer(tmp_path / "b.jsonl")
    a = [strip_timestamps(r) for r in read_log(log)]
    b = [strip_timestamps(r) for r in read_log(tmp_path / "b.jsonl")]
    assert a == b


def test_resume_after_crash(session_run, tmp_path):
    _, full = session_run
    lines = full.read_text().splitlines(keepends=True)
    partial = tmp_path / "p.jsonl"
    partial.write_text("".join(lines[:12]))
    s = run_rv_timer(partial, resume=True)
    assert len(s.passing()) == 7
    assert [strip_timestamps(r) for r in read_log(partial)] == [strip_timestamps(r) for r in read_log(full)]


def test_resume_mismatch(session_run, tmp_path):
    _, full = session_run
    lines = full.read_text().splitlines()
    rec = json.loads(lines[2])
    rec["body"] = "something else"
    lines[2] = json.dumps(rec)
    path = tmp_path / "m.jsonl"
    path.write_text("\n".join(lines[:5]) + "\n")
    with pytest.raises(ResumeMismatch):
        run_rv_timer(path, resume=True)


def test_max_iterations_abandons(tmp_path):
    s = run_rv_timer(tmp_path / "l.jsonl", max_iterations=1)
    assert s.assertions["tick_generate"].status == "abandoned"
    assert s.assertions["tick_count_reset"].status == "passing"
    assert all(st.iterations_used <= 1 for st in s.assertions.values())


def test_interactive_confirm(tmp_path):
    seen = []

    def confirm(prompt):
        seen.append(prompt.subject)
        return prompt.body

    s = run_rv_timer(tmp_path / "i.jsonl", confirm=confirm, interactive_confirm=True)
    assert len(seen) == 5 and len(s.passing()) == 7
    with pytest.raises(SessionAborted):
        run_rv_timer(tmp_path / "j.jsonl", confirm=lambda p: None, interactive_confirm=True)


def test_context_overflow(tmp_path):
    with pytest.raises(ContextOverflow):
        run_rv_timer(tmp_path / "o.jsonl", token_budget=500)
    assert read_log(tmp_path / "o.jsonl")[0]["type"] == "session"


def test_fixtures_exhausted_keeps_log(tmp_path):
    short = tmp_path / "replay"
    short.mkdir()
    for f in sorted((DATA / "replay").glob("*_response.txt"))[:4]:
        (short / f.name).write_text(f.read_text())
    with pytest.raises(FixturesExhausted):
        run_rv_timer(tmp_path / "x.jsonl", replay_dir=short)
    assert sum(r["type"] == "response" for r in read_log(tmp_path / "x.jsonl")) == 4


def test_load_session_rejects_garbage(tmp_path):
    p = tmp_path / "g.jsonl"
    p.write_text("{not json\n")
    with pytest.raises(SessionError):
        load_session(p)
    assert os.path.exists(p)
