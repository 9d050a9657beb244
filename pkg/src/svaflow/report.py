"""Per-design summary table and iteration counts, as Markdown and CSV."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .compare import MatchResult, compare_sets
from .orchestrator.session import RefinementSession
from .sva.ast import AssertionAst
from .trace.model import Trace

DASH = "—"
TABLE_COLUMNS = ("Module", "Reference", "Generated", "Alternative", "Common", "Trace span")
ITERATION_COLUMNS = ("design", "tool", "assertion", "iterations", "status", "provenance")


class SessionIncomplete(ValueError):
    pass


@dataclass(frozen=True)
class DesignRow:
    module_name: str
    reference_assert_count: int
    generated_assert_count: int
    alt_assert_count: int | None
    common_assert_count: int | None
    trace_time_span: int
    timescale: str = "1ns"

    def __post_init__(self):
        counts = [self.reference_assert_count, self.generated_assert_count, self.trace_time_span]
        counts += [c for c in (self.alt_assert_count, self.common_assert_count) if c is not None]
        if any(c < 0 for c in counts):
            raise ValueError("counts must be non-negative")
        if self.alt_assert_count is not None and self.common_assert_count is not None:
            if self.common_assert_count > min(self.generated_assert_count, self.alt_assert_count):
                raise ValueError("common count exceeds one of the set sizes")

    def cells(self) -> list[str]:
        opt = lambda v: DASH if v is None else str(v)  # noqa: E731
        return [
            self.module_name,
            str(self.reference_assert_count),
            str(self.generated_assert_count),
            opt(self.alt_assert_count),
            opt(self.common_assert_count),
            str(self.trace_time_span),
        ]


def build_row(
    session: RefinementSession,
    reference_set: Sequence[AssertionAst],
    alt_set: Sequence[AssertionAst] | None,
    probes: Sequence[Trace],
    parameters: dict[str, int] | None = None,
) -> tuple[DesignRow, MatchResult | None]:
    if not session.completed:
        raise SessionIncomplete(f"session for {session.design} did not finish")
    generated = session.passing()
    match = None
    if alt_set is not None:
        params = {**session.inventory.parameters, **session.config.parameters, **(parameters or {})}
        match = compare_sets(generated, alt_set, probes, params)
    row = DesignRow(
        module_name=session.design,
        reference_assert_count=len(reference_set),
        generated_assert_count=len(generated),
        alt_assert_count=None if alt_set is None else len(alt_set),
        common_assert_count=None if match is None else match.count,
        trace_time_span=session.trace_span(),
    )
    return row, match


def render_markdown(rows: Sequence[DesignRow], matches: Sequence[MatchResult | None] = ()) -> str:
    out = ["# Assertion generation report", ""]
    out.append("| " + " | ".join(TABLE_COLUMNS) + " |")
    out.append("|" + "|".join("---" for _ in TABLE_COLUMNS) + "|")
    for row in rows:
        out.append("| " + " | ".join(row.cells()) + " |")
    out.append("")
    units = sorted({r.timescale for r in rows}) or ["1ns"]
    out.append(
        f"Trace span is measured locally: last minus first sampled clock edge over the session traces, "
        f"in timescale units ({', '.join(units)})."
    )
    for row, match in zip(rows, matches):
        if match is None:
            continue
        out += ["", f"## Common assertions: {row.module_name}", ""]
        out.append("| Generated | Alternative | Match | Probe agreement |")
        out.append("|---|---|---|---|")
        for p in match.pairs:
            agreement = DASH if p.probe_agreement is None else f"{p.probe_agreement:.2f}"
            out.append(f"| {p.left} | {p.right or DASH} | {p.label} | {agreement} |")
        out.append("")
        out.append(
            f"Probe-consistent pairs agree on all {match.probes} probe traces (seed {match.seed}); "
            "this is evidence of equivalence, not a proof."
        )
    return "\n".join(out) + "\n"


def render_csv(rows: Sequence[DesignRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TABLE_COLUMNS)
    for row in rows:
        w.writerow(row.cells())
    return buf.getvalue()


def iteration_histogram(
    sessions: Sequence[RefinementSession], tool: str = "generated", narrative: dict[str, Sequence[str]] | None = None
) -> str:
    """CSV of error-feedback prompts per assertion plus a total row per design.

    ``narrative`` maps a design to assertion names whose trajectories are
    externally documented; every other count is tagged as fixture-authored.
    """
    narrative = narrative or {}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ITERATION_COLUMNS)
    for s in sessions:
        documented = set(narrative.get(s.design, ()))
        for name, state in s.assertions.items():
            provenance = "documented" if name in documented else "fixture"
            w.writerow((s.design, tool, name, state.iterations_used, state.status, provenance))
        w.writerow((s.design, tool, "TOTAL", s.total_iterations(), "", ""))
    return buf.getvalue()


def write_report(
    out_dir: Path | str,
    rows: Sequence[DesignRow],
    matches: Sequence[MatchResult | None],
    sessions: Sequence[RefinementSession],
    narrative: dict[str, Sequence[str]] | None = None,
) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "report.md": render_markdown(rows, matches),
        "report.csv": render_csv(rows),
        "iterations.csv": iteration_histogram(sessions, narrative=narrative),
    }
    paths = []
    for name, text in files.items():
        p = out / name
        p.write_text(text, encoding="utf-8")
        paths.append(p)
    return paths
