from __future__ import annotations

from dataclasses import replace
from typing import Iterable, Sequence

from ..diagnostics import Diagnostic
from ..sva.ast import AssertionAst
from ..sva.transform import normalize
from ..trace.model import EvalReport

SYNTAX = "syntax"
UNKNOWN_SIGNAL = "unknown_signal"
SEMANTIC_FAIL = "semantic_fail"
SUSPECTED_DESIGN_BUG = "suspected_design_bug"
CLEAN = "clean"

SIGNAL_CODES = {"UnknownSignal", "SignalMissingFromTrace"}


def classify_failure(
    diags: Iterable[Diagnostic],
    report: EvalReport | None = None,
    reference_expects_pass: bool = False,
) -> str:
    """Bucket a checked assertion for the repair loop.

    ``reference_expects_pass`` is set by the caller when a reference assertion
    set contains the same check; a failure is then blamed on the design.
    """
    errors = [d for d in diags if d.is_error]
    if any(d.code not in SIGNAL_CODES for d in errors):
        return SYNTAX
    if errors:
        return UNKNOWN_SIGNAL
    if report is None:
        return CLEAN
    if report.fails > 0:
        return SUSPECTED_DESIGN_BUG if reference_expects_pass else SEMANTIC_FAIL
    if report.passes == 0:
        return SEMANTIC_FAIL
    return CLEAN


def reference_expects_pass(ast: AssertionAst, references: Sequence[AssertionAst]) -> bool:
    """True when some reference assertion is the same check up to normalization."""
    if not references:
        return False
    mine = _key(ast)
    return any(_key(r) == mine for r in references)


def _key(ast: AssertionAst) -> AssertionAst:
    return normalize(replace(ast, name="_", origin="manual"))
