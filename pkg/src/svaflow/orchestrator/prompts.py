"""Prompt templates for each pipeline stage.

Templates are plain ``str.format`` strings. Any change to their wording must
bump ``TEMPLATE_VERSION`` so that logged sessions stay attributable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from ..diagnostics import Diagnostic
from ..trace.model import EvalReport

TEMPLATE_VERSION = "1"
STAGES = ("context_seed", "spec", "block_diagram", "verilog_sync", "error_feedback")


class PayloadMismatch(ValueError):
    pass


@dataclass(frozen=True)
class PromptRecord:
    stage: str
    body: str
    iteration: int = 0
    subject: str | None = None  # assertion being repaired (error_feedback only)
    timestamp: float | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.stage not in STAGES:
            raise ValueError(f"unknown stage {self.stage!r}")
        if self.stage == "error_feedback":
            if self.iteration < 1:
                raise ValueError("error_feedback iterations start at 1")
        elif self.iteration != 0:
            raise ValueError(f"{self.stage} prompts have iteration 0")

    @property
    def role(self) -> str:
        return "system" if self.stage == "context_seed" else "user"


@dataclass(frozen=True)
class FeedbackPayload:
    """What the checker found wrong with one assertion."""

    name: str
    assertion_text: str
    iteration: int
    diagnostics: Sequence[Diagnostic] = ()
    report: EvalReport | None = None
    trace_names: Sequence[str] = ()


CONTEXT_SEED = """\
You are a verification engineer writing SystemVerilog Assertions (SVA) for \
dynamic assertion-based verification. Use concurrent assertions clocked on the \
design clock, one `property ... endproperty` block per check followed by \
`assert property (<name>);`. Keep each property to a single implication.
{documents}"""

CONTEXT_DOCUMENT = """
--- reference: {title} ---
{text}"""

SPEC = """\
Design under verification: {design}

Natural-language specification:
<<<
{spec}
>>>

List the functional behaviours that should be checked, explain each one in \
a sentence, and sketch an SVA property for each."""

BLOCK_DIAGRAM = """\
Block diagram of {design}, given as a textual description of its blocks and \
the signals flowing between them:
<<<
{diagram}
>>>

Refine the behaviours you listed so they follow this information flow."""

VERILOG_SYNC = """\
Here is the RTL implementation of {design}:
```systemverilog
{rtl}
```

Rewrite every property you proposed so that each signal, parameter and \
vector index uses the exact names declared in this RTL. Return the final \
assertions in a single ```systemverilog``` block and give a one-line English \
description of each."""

ERROR_FEEDBACK = """\
Assertion `{name}` did not pass verification (repair round {iteration}).

Current assertion:
```systemverilog
{assertion}
```

Checker output:
{findings}

Analyze the cause of this failure, rectify the assertion and regenerate only \
assertion `{name}`. Keep the property name `{name}` and return it in a single \
```systemverilog``` block."""


def _context_body(documents: Sequence[tuple[str, str]]) -> str:
    docs = "".join(CONTEXT_DOCUMENT.format(title=t, text=x.strip()) for t, x in documents)
    return CONTEXT_SEED.format(documents=docs)


def _findings(p: FeedbackPayload) -> str:
    lines = [str(d) for d in p.diagnostics if d.is_error]
    r = p.report
    if r is not None:
        if r.first_failure_message:
            lines.append(r.first_failure_message)
        where = f" over traces {', '.join(p.trace_names)}" if p.trace_names else ""
        lines.append(
            f"Summary{where}: attempts={r.attempts} passes={r.passes} fails={r.fails} "
            f"vacuous={r.vacuous} disabled={r.disabled} incomplete={r.incomplete}"
        )
        if r.fails and r.fail_cycles:
            lines.append(f"Failing cycles: {', '.join(str(c) for c in r.fail_cycles)}")
        if r.fails == 0 and r.passes == 0:
            lines.append("The assertion never passed non-vacuously, so it checks nothing on these traces.")
    return "\n".join(lines)


def _text(payload, what: str) -> str:
    if not isinstance(payload, str) or not payload.strip():
        raise PayloadMismatch(f"{what} must be non-empty text")
    return payload


def build_prompt(stage: str, session, payload) -> PromptRecord:
    """Instantiate the template for ``stage``.

    ``session`` is a session object (its ``design`` is used) or a design name.
    Payloads: ``context_seed`` a sequence of (title, text) documents; ``spec``,
    ``block_diagram`` and ``verilog_sync`` text; ``error_feedback`` a
    :class:`FeedbackPayload`.
    """
    design = getattr(session, "design", session)
    if stage == "context_seed":
        if isinstance(payload, str) or not all(
            isinstance(d, tuple) and len(d) == 2 and all(isinstance(x, str) for x in d) for d in payload
        ):
            raise PayloadMismatch("context_seed expects (title, text) documents")
        return PromptRecord(stage, _context_body(payload))
    if stage == "spec":
        return PromptRecord(stage, SPEC.format(design=design, spec=_text(payload, "specification").strip()))
    if stage == "block_diagram":
        return PromptRecord(stage, BLOCK_DIAGRAM.format(design=design, diagram=_text(payload, "diagram").strip()))
    if stage == "verilog_sync":
        rtl = _text(payload, "RTL source")
        if "module" not in rtl:
            raise PayloadMismatch("verilog_sync payload does not look like Verilog (no module)")
        return PromptRecord(stage, VERILOG_SYNC.format(design=design, rtl=rtl.strip()))
    if stage == "error_feedback":
        if not isinstance(payload, FeedbackPayload):
            raise PayloadMismatch("error_feedback expects a FeedbackPayload")
        findings = _findings(payload)
        if not findings:
            raise PayloadMismatch("error_feedback needs an error diagnostic or an evaluation report")
        body = ERROR_FEEDBACK.format(
            name=payload.name, iteration=payload.iteration,
            assertion=payload.assertion_text.strip(), findings=findings,
        )
        return PromptRecord(stage, body, payload.iteration, payload.name)
    raise PayloadMismatch(f"unknown stage {stage!r}")
