"""The generate / check / repair loop and its append-only JSON-lines log."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from ..diagnostics import Diagnostic
from ..sva.ast import AssertionAst
from ..sva.parser import parse_assertions
from ..sva.printer import pretty_print
from ..sva.semantics import check_semantics
from ..sva.serialize import assertion_from_json, assertion_to_json
from ..sva.transform import UnboundParameter, expand_generate
from ..trace.evaluate import evaluate
from ..trace.model import ClockMismatch, EvalReport, SignalMissingFromTrace, Trace
from ..verilog import SignalInventory, extract_signals
from .backends import Backend, ContextOverflow, LlmResponse, ResumingBackend, estimate_tokens, make_backend
from .classify import CLEAN, SUSPECTED_DESIGN_BUG, classify_failure, reference_expects_pass
from .config import SessionConfig, config_from_dict
from .extract import extract_sva
from .prompts import TEMPLATE_VERSION, FeedbackPayload, PromptRecord, build_prompt

LOG_SCHEMA = 1
STATUSES = ("raw", "failing", "passing", "abandoned", "suspected_design_bug")
_ALLOWED = {
    "raw": {"failing", "passing"},
    "failing": {"failing", "passing", "abandoned", "suspected_design_bug"},
    "suspected_design_bug": set(),
    "passing": set(),
    "abandoned": set(),
}


class SessionError(RuntimeError):
    pass


class ResumeMismatch(SessionError):
    pass


class SessionAborted(SessionError):
    pass


@dataclass
class AssertionState:
    name: str
    text: str
    ast: AssertionAst | None
    status: str = "raw"
    iterations_used: int = 0
    classification: str | None = None
    diagnostics: list[Diagnostic] = field(default_factory=list)
    report: EvalReport | None = None

    def move_to(self, status: str):
        if status not in _ALLOWED[self.status]:
            raise SessionError(f"{self.name}: illegal status change {self.status} -> {status}")
        self.status = status


@dataclass
class RefinementSession:
    design: str
    inventory: SignalInventory
    config: SessionConfig
    system_prompt: PromptRecord | None = None
    history: list[tuple[PromptRecord, LlmResponse]] = field(default_factory=list)
    assertions: dict[str, AssertionState] = field(default_factory=dict)
    traces: list[dict] = field(default_factory=list)  # name, cycles, first_edge, last_edge
    completed: bool = False

    def passing(self) -> list[AssertionAst]:
        return [s.ast for s in self.assertions.values() if s.status == "passing"]

    def total_iterations(self) -> int:
        return sum(s.iterations_used for s in self.assertions.values())

    def trace_span(self) -> int:
        if not self.traces:
            return 0
        return max(t["last_edge"] for t in self.traces) - min(t["first_edge"] for t in self.traces)

    def messages(self, extra: PromptRecord | None = None) -> list[dict]:
        msgs = []
        if self.system_prompt is not None:
            msgs.append({"role": "system", "content": self.system_prompt.body})
        for prompt, response in self.history:
            msgs.append({"role": "user", "content": prompt.body})
            msgs.append({"role": "assistant", "content": response.raw})
        if extra is not None:
            msgs.append({"role": extra.role, "content": extra.body})
        return msgs


# --------------------------------------------------------------------------
# log


def strip_timestamps(record: dict) -> dict:
    return {k: v for k, v in record.items() if k != "ts"}


def read_log(path: Path | str) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise SessionError(f"{path}:{lineno}: corrupt log line ({exc.msg})") from None
    if records and records[0].get("schema") != LOG_SCHEMA:
        raise SessionError(f"{path}: unsupported log schema {records[0].get('schema')!r}")
    return records


class SessionLog:
    """Append-only JSONL writer.

    When resuming, records that a previous run already wrote are compared
    (without timestamps) instead of written again.
    """

    def __init__(self, path: Path | str | None, resume: bool = False, clock: Callable[[], float] = time.time):
        self.path = Path(path) if path else None
        self.clock = clock
        self.existing: list[dict] = []
        self.position = 0
        if self.path and resume and self.path.exists():
            self.existing = read_log(self.path)
        elif self.path:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.write_text("", encoding="utf-8")

    def logged_responses(self) -> list[str]:
        return [r["raw"] for r in self.existing if r["type"] == "response"]

    def emit(self, record: dict):
        record = {"schema": LOG_SCHEMA, **record}
        if self.position < len(self.existing):
            old = strip_timestamps(self.existing[self.position])
            if old != record:
                raise ResumeMismatch(f"log record {self.position} differs from the replayed run")
            self.position += 1
            return
        self.position += 1
        if self.path is None:
            return
        record["ts"] = round(self.clock(), 3)
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")


# --------------------------------------------------------------------------
# checking


def _error(code: str, message: str, name: str, text: str) -> Diagnostic:
    return Diagnostic("error", code, message, (0, max(1, len(text.encode("utf-8")))), name)


def check_assertion(
    ast: AssertionAst, inventory: SignalInventory, traces: Sequence[Trace], parameters: dict[str, int]
) -> tuple[list[Diagnostic], EvalReport | None]:
    """Semantic checks, then evaluation of every generate copy on every trace."""
    diags = check_semantics(ast, inventory)
    if any(d.is_error for d in diags):
        return diags, None
    text = pretty_print(ast)
    try:
        copies = expand_generate(ast, parameters)
    except UnboundParameter as exc:
        return diags + [_error("UnboundParameter", f"generate bound {exc.args[0]} has no value", ast.name, text)], None
    reports = []
    try:
        for trace in traces:
            for copy in copies:
                reports.append(evaluate(copy, trace))
    except SignalMissingFromTrace as exc:
        return diags + [_error("SignalMissingFromTrace", str(exc), ast.name, text)], None
    except ClockMismatch as exc:
        return diags + [_error("ClockMismatch", str(exc), ast.name, text)], None
    return diags, EvalReport.merge(ast.name, reports)


def _parse_response(response: LlmResponse) -> tuple[dict[str, AssertionState], list[Diagnostic]]:
    """Assertions found in a reply, keyed by name, plus errors not tied to any name."""
    found: dict[str, AssertionState] = {}
    orphans: list[Diagnostic] = []
    for block in response.extracted_blocks:
        asts, diags = parse_assertions(block)
        parsed = {a.name for a in asts}
        for ast in asts:
            if ast.name not in found:
                mine = [d for d in diags if d.subject == ast.name]
                found[ast.name] = AssertionState(ast.name, pretty_print(ast), ast, diagnostics=mine)
        for d in diags:
            if not d.is_error or d.subject in parsed:
                continue
            if d.subject is None:
                orphans.append(d)
                continue
            state = found.setdefault(d.subject, AssertionState(d.subject, block.strip(), None))
            if state.ast is None:
                state.diagnostics.append(d)
    return found, orphans


# --------------------------------------------------------------------------
# driver


ConfirmFn = Callable[[PromptRecord], "str | None"]


class _Runner:
    def __init__(self, session, backend: Backend, log: SessionLog, traces, references, confirm):
        self.s = session
        self.backend = backend
        self.log = log
        self.traces = traces
        self.references = references
        self.confirm = confirm
        self.parameters = {**session.inventory.parameters, **session.config.parameters}

    def query(self, prompt: PromptRecord) -> LlmResponse:
        messages = self.s.messages(prompt)
        needed = estimate_tokens(messages)
        if needed > self.s.config.token_budget:
            raise ContextOverflow(needed, self.s.config.token_budget)
        self.log.emit({"type": "prompt", "index": len(self.s.history), "stage": prompt.stage,
                       "iteration": prompt.iteration, "subject": prompt.subject, "body": prompt.body})
        raw = self.backend.complete(messages)
        blocks = tuple(extract_sva(raw))
        response = LlmResponse(raw, blocks, self.backend.backend_id)
        self.s.history.append((prompt, response))
        self.log.emit({"type": "response", "index": len(self.s.history) - 1, "backend_id": response.backend_id,
                       "raw": raw, "blocks": list(blocks)})
        return response

    def record(self, state: AssertionState):
        self.log.emit({
            "type": "status",
            "assertion": state.name,
            "status": state.status,
            "iterations_used": state.iterations_used,
            "classification": state.classification,
            "text": state.text,
            "ast": assertion_to_json(state.ast) if state.ast is not None else None,
            "diagnostics": [d.to_dict() for d in state.diagnostics],
            "report": state.report.to_dict() if state.report else None,
        })

    def check(self, state: AssertionState):
        if state.ast is None:
            diags, report = list(state.diagnostics), None
        else:
            parse_diags = list(state.diagnostics)
            sem, report = check_assertion(state.ast, self.s.inventory, self.traces, self.parameters)
            diags = parse_diags + sem
        expects = state.ast is not None and reference_expects_pass(state.ast, self.references)
        state.diagnostics = diags
        state.report = report
        state.classification = classify_failure(diags, report, expects)

    def repair(self, state: AssertionState):
        cfg = self.s.config
        self.check(state)
        self.record(state)
        while state.classification != CLEAN:
            if state.status == "raw":
                state.move_to("failing")
                self.record(state)
            if state.classification == SUSPECTED_DESIGN_BUG:
                state.move_to("suspected_design_bug")
                self.record(state)
                return
            if state.iterations_used >= cfg.max_iterations:
                state.move_to("abandoned")
                self.record(state)
                return
            state.iterations_used += 1
            payload = FeedbackPayload(
                state.name, state.text, state.iterations_used, state.diagnostics, state.report,
                [t.name for t in self.traces if t.name],
            )
            prompt = build_prompt("error_feedback", self.s, payload)
            if self.confirm is not None:
                edited = self.confirm(prompt)
                if edited is None:
                    raise SessionAborted(f"repair of {state.name} declined at the confirmation prompt")
                if edited != prompt.body:
                    prompt = PromptRecord(prompt.stage, edited, prompt.iteration, prompt.subject)
            response = self.query(prompt)
            found, orphans = _parse_response(response)
            fresh = found.get(state.name)
            if fresh is None:
                state.ast = None
                state.diagnostics = orphans + [
                    _error("MissingAssertion", f"the reply contains no assertion named '{state.name}'",
                           state.name, response.raw or " ")
                ]
            else:
                state.ast, state.text = fresh.ast, fresh.text
                state.diagnostics = fresh.diagnostics + (orphans if fresh.ast is None else [])
            self.check(state)
            if state.classification != CLEAN:
                state.move_to("failing")
                self.record(state)
        state.move_to("passing")
        self.record(state)


def run_session(
    spec: str,
    rtl: str,
    traces: Sequence[Trace],
    config: SessionConfig,
    *,
    backend: Backend | None = None,
    log_path: Path | str | None = None,
    resume: bool = False,
    block_diagram: str | None = None,
    context_docs: Sequence[tuple[str, str]] = (),
    references: Sequence[AssertionAst] = (),
    confirm: ConfirmFn | None = None,
) -> RefinementSession:
    if not traces:
        raise SessionError("at least one trace is required")
    inventory = extract_signals(rtl, roles=config.roles)
    session = RefinementSession(config.design, inventory, config)
    session.traces = [
        {"name": t.name, "cycles": t.cycles, "first_edge": t.edge_times[0], "last_edge": t.edge_times[-1]}
        for t in traces
    ]
    log = SessionLog(log_path, resume=resume)
    backend = backend or make_backend(config)
    if log.existing:
        backend = ResumingBackend(backend, log.logged_responses())
    if config.interactive_confirm and confirm is None:
        raise SessionError("interactive_confirm is set but no confirmation handler was given")
    runner = _Runner(session, backend, log, list(traces), list(references), confirm if config.interactive_confirm else None)

    log.emit({
        "type": "session",
        "design": config.design,
        "template_version": TEMPLATE_VERSION,
        "config": config.to_dict(),
        "inventory": inventory.to_dict(),
        "traces": session.traces,
        "references": [assertion_to_json(r) for r in references],
    })
    session.system_prompt = build_prompt("context_seed", session, list(context_docs))
    log.emit({"type": "prompt", "index": None, "stage": "context_seed", "iteration": 0, "subject": None,
              "body": session.system_prompt.body})

    latest_blocks = runner.query(build_prompt("spec", session, spec))
    if block_diagram:
        latest_blocks = runner.query(build_prompt("block_diagram", session, block_diagram))
    synced = runner.query(build_prompt("verilog_sync", session, rtl))
    found, _ = _parse_response(synced)
    if not found:
        found, _ = _parse_response(latest_blocks)
    session.assertions = found

    for state in session.assertions.values():
        runner.repair(state)

    session.completed = True
    log.emit({"type": "end", "summary": summarize(session)})
    return session


def summarize(session: RefinementSession) -> dict:
    counts = {s: 0 for s in STATUSES}
    for state in session.assertions.values():
        counts[state.status] += 1
    return {
        "assertions": len(session.assertions),
        "statuses": counts,
        "iterations": {n: s.iterations_used for n, s in session.assertions.items()},
        "error_feedback_prompts": session.total_iterations(),
        "llm_queries": len(session.history),
    }


def load_session(path: Path | str) -> RefinementSession:
    """Rebuild a session from its log (no backend or traces needed)."""
    records = read_log(path)
    if not records or records[0]["type"] != "session":
        raise SessionError(f"{path}: not a session log")
    head = records[0]
    config = config_from_dict({k: v for k, v in head["config"].items() if v is not None})
    session = RefinementSession(head["design"], SignalInventory.from_dict(head["inventory"]), config)
    session.traces = head["traces"]
    pending: PromptRecord | None = None
    for rec in records[1:]:
        kind = rec["type"]
        if kind == "prompt":
            prompt = PromptRecord(rec["stage"], rec["body"], rec["iteration"], rec["subject"], rec.get("ts"))
            if rec["stage"] == "context_seed":
                session.system_prompt = prompt
            else:
                pending = prompt
        elif kind == "response":
            if pending is None:
                raise SessionError(f"{path}: response without a prompt")
            session.history.append((pending, LlmResponse(rec["raw"], tuple(rec["blocks"]), rec["backend_id"])))
            pending = None
        elif kind == "status":
            state = session.assertions.get(rec["assertion"])
            ast = assertion_from_json(rec["ast"]) if rec["ast"] else None
            if state is None:
                state = session.assertions[rec["assertion"]] = AssertionState(rec["assertion"], rec["text"], ast)
            state.text, state.ast = rec["text"], ast
            state.status = rec["status"]
            state.iterations_used = rec["iterations_used"]
            state.classification = rec["classification"]
            state.diagnostics = [Diagnostic.from_dict(d) for d in rec["diagnostics"]]
            state.report = EvalReport.from_dict(rec["report"]) if rec["report"] else None
        elif kind == "end":
            session.completed = True
    return session
