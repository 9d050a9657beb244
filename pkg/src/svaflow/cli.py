"""Command-line entry point: ``svaflow <command> ...``.

Exit codes: 0 success, 1 assertion failures present, 2 usage or input error,
3 LLM backend error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Sequence

from . import rvtimer
from .compare import compare_sets, load_assertions, random_probes
from .diagnostics import Diagnostic
from .orchestrator.backends import BackendError
from .orchestrator.config import ConfigError, SessionConfig, load_config
from .orchestrator.prompts import PromptRecord
from .orchestrator.session import SessionAborted, SessionError, load_session, run_session
from .report import build_row, write_report
from .sva.parser import parse_assertions
from .sva.semantics import check_semantics
from .sva.serialize import dump_assertion_set
from .sva.printer import pretty_print
from .sva.transform import UnboundParameter, expand_generate
from .trace.evaluate import evaluate
from .trace.junit import junit_xml
from .trace.model import EvalReport, TraceError
from .trace.vcd import read_vcd_file
from .verilog import ExtractError, SignalInventory, extract_signals

OK, FAILURES, INPUT_ERROR, BACKEND_ERROR = 0, 1, 2, 3


class InputError(Exception):
    pass


def _err(msg: str):
    print(msg, file=sys.stderr)


def _read(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None


def _params(items: Sequence[str] | None) -> dict[str, int]:
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        try:
            if not sep:
                raise ValueError
            out[name.strip()] = int(value, 0)
        except ValueError:
            raise InputError(f"bad --param {item!r}; expected NAME=INT") from None
    return out


def _inventory(path: str | None) -> SignalInventory | None:
    if path is None:
        return None
    try:
        return extract_signals(_read(path))
    except ExtractError as exc:
        raise InputError(f"{path}: {exc}") from None


def _table(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    rows = [tuple(str(c) for c in r) for r in rows]
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    return "\n".join(lines)


# --------------------------------------------------------------------------
# commands


def cmd_extract(args) -> int:
    try:
        inv = extract_signals(_read(args.rtl), module=args.module, header_only=args.header_only)
    except ExtractError as exc:
        raise InputError(f"{args.rtl}: {exc}") from None
    print(inv.to_json())
    return OK


def _parse_file(path: str) -> tuple[list, list[Diagnostic]]:
    return parse_assertions(_read(path))


def cmd_lint(args) -> int:
    asts, diags = _parse_file(args.sva)
    inv = _inventory(args.rtl)
    if inv is not None:
        for ast in asts:
            diags += check_semantics(ast, inv)
    for d in diags:
        _err(f"{args.sva}: {d}")
    errors = sum(d.is_error for d in diags)
    if args.json:
        print(json.dumps({"assertions": [a.name for a in asts], "diagnostics": [d.to_dict() for d in diags]},
                         indent=2))
    else:
        print(_table(("assertion", "errors", "warnings"), [
            (a.name, sum(d.is_error for d in diags if d.subject == a.name),
             sum(not d.is_error for d in diags if d.subject == a.name)) for a in asts
        ]))
        print(f"\n{len(asts)} assertions, {errors} errors, {len(diags) - errors} warnings")
    return INPUT_ERROR if errors else OK


def cmd_check(args) -> int:
    asts, diags = _parse_file(args.sva)
    errors = [d for d in diags if d.is_error]
    try:
        traces = [read_vcd_file(p, args.clock) for p in args.vcd]
    except OSError as exc:
        raise InputError(f"cannot read trace: {exc}") from None
    except TraceError as exc:
        raise InputError(str(exc)) from None
    inv = _inventory(args.rtl)
    params = dict(inv.parameters) if inv else {}
    params.update(_params(args.param))
    if inv is None:
        # without RTL, the first trace's signals serve as the inventory
        inv = SignalInventory.from_trace(traces[0])
    for ast in asts:
        errors += [d for d in check_semantics(ast, inv) if d.is_error]
    if errors:
        for d in errors:
            _err(f"{args.sva}: {d}")
        return INPUT_ERROR

    def run(ast):
        try:
            copies = expand_generate(ast, params)
        except UnboundParameter as exc:
            raise InputError(f"{ast.name}: generate bound {exc.args[0]} needs --param") from None
        return EvalReport.merge(ast.name, [evaluate(c, t) for t in traces for c in copies])

    try:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(run, asts))
    except TraceError as exc:
        raise InputError(str(exc)) from None
    reports.sort(key=lambda r: r.assertion_name)
    for r in reports:
        if r.first_failure_message:
            _err(r.first_failure_message)
    if args.junit:
        Path(args.junit).write_text(junit_xml(reports), encoding="utf-8")
    if args.json:
        print(json.dumps([r.to_dict() for r in reports], indent=2))
    else:
        print(_table(
            ("assertion", "attempts", "pass", "fail", "vacuous", "disabled", "incomplete", "x-fails"),
            [(r.assertion_name, r.attempts, r.passes, r.fails, r.vacuous, r.disabled, r.incomplete,
              r.unknown_fails) for r in reports],
        ))
    return FAILURES if any(r.fails for r in reports) else OK


def _config_for_gen(args) -> SessionConfig:
    if args.config:
        try:
            cfg = load_config(Path(args.config).resolve())
        except (OSError, ConfigError) as exc:
            raise InputError(f"config: {exc}") from None
    else:
        cfg = SessionConfig()
    cwd = Path.cwd()
    try:
        return cfg.with_overrides(
            design=args.design,
            backend=args.backend,
            max_iterations=args.max_iter,
            interactive_confirm=True if args.interactive else None,
            replay_dir=cwd / args.replay_dir if args.replay_dir else None,
            spec=cwd / args.spec if args.spec else None,
            rtl=cwd / args.rtl if args.rtl else None,
            traces=tuple(cwd / p for p in args.vcd) if args.vcd else None,
            clock=args.clock,
            parameters={**cfg.parameters, **_params(args.param)} if args.param else None,
        )
    except ConfigError as exc:
        raise InputError(str(exc)) from None


def terminal_confirm(prompt: PromptRecord) -> str | None:
    """Show a repair prompt; Enter sends it, 'e' replaces it, 'q' aborts."""
    print(f"--- proposed {prompt.stage} prompt for {prompt.subject} ---\n{prompt.body}\n---", file=sys.stderr)
    answer = input("[Enter] send, [e] edit, [q] quit: ").strip().lower()
    if answer == "q":
        return None
    if answer == "e":
        print("Type the replacement prompt; finish with a line containing only '.'", file=sys.stderr)
        lines = []
        while (line := input()) != ".":
            lines.append(line)
        return "\n".join(lines)
    return prompt.body


def cmd_gen(args) -> int:
    cfg = _config_for_gen(args)
    missing = [k for k in ("spec", "rtl") if getattr(cfg, k) is None]
    if missing or not cfg.traces:
        raise InputError("gen needs a spec, an RTL file and at least one trace (flags or --config)")
    rtl = _read(cfg.rtl)
    try:
        inv = extract_signals(rtl, roles=cfg.roles)
    except ExtractError as exc:
        raise InputError(f"{cfg.rtl}: {exc}") from None
    clock = cfg.clock or next((s.name for s in inv.signals if s.role_hint == "clock"), None)
    if clock is None:
        raise InputError("no clock: pass --clock or name it in the config")
    try:
        traces = [read_vcd_file(p, clock) for p in cfg.traces]
    except OSError as exc:
        raise InputError(f"cannot read trace: {exc}") from None
    except TraceError as exc:
        raise InputError(str(exc)) from None
    references = load_assertions(cfg.reference) if cfg.reference else []
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        session = run_session(
            _read(cfg.spec), rtl, traces, cfg,
            log_path=out / "session.jsonl",
            resume=args.resume,
            block_diagram=_read(cfg.block_diagram) if cfg.block_diagram else None,
            context_docs=[(p.stem, _read(p)) for p in cfg.context_docs],
            references=references,
            confirm=terminal_confirm if cfg.interactive_confirm else None,
        )
    except BackendError as exc:
        _err(f"backend error: {exc}")
        return BACKEND_ERROR
    except SessionAborted as exc:
        _err(str(exc))
        return INPUT_ERROR
    except SessionError as exc:
        raise InputError(str(exc)) from None
    passing = session.passing()
    (out / "assertions.json").write_text(dump_assertion_set(passing) + "\n", encoding="utf-8")
    (out / "assertions.sva").write_text(pretty_print(passing), encoding="utf-8")
    rows = [(n, s.status, s.iterations_used, s.classification) for n, s in session.assertions.items()]
    if args.json:
        print(json.dumps([dict(zip(("assertion", "status", "iterations", "classification"), r)) for r in rows],
                         indent=2))
    else:
        print(_table(("assertion", "status", "iterations", "last check"), rows))
        print(f"\n{len(passing)} passing of {len(rows)}; {session.total_iterations()} error-feedback prompts")
    return OK if len(passing) == len(rows) else FAILURES


def _probe_set(kind: str, count: int, cycles: int, seed: int, widths: dict[str, int], clock: str):
    if kind == "rv_timer":
        return rvtimer.probe_traces(count=count, cycles=cycles, seed=seed)
    return random_probes(widths, count=count, cycles=cycles, seed=seed, clock=clock)


def _load_side(path: str) -> tuple[list, dict[str, int]]:
    """Assertions from a file, plus design parameters when it is a session log."""
    p = Path(path)
    try:
        if p.suffix == ".jsonl":
            s = load_session(p)
            return s.passing(), {**s.inventory.parameters, **s.config.parameters}
        return load_assertions(p), {}
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    except (ValueError, SessionError) as exc:
        raise InputError(str(exc)) from None


def cmd_compare(args) -> int:
    (left, lparams), (right, rparams) = _load_side(args.left), _load_side(args.right)
    inv = _inventory(args.rtl)
    params = {**lparams, **rparams, **(inv.parameters if inv else {}), **_params(args.param)}
    if args.probe_vcd:
        probes = [read_vcd_file(p, args.clock) for p in args.probe_vcd]
    else:
        widths = inv.trace_widths() if inv else {}
        if args.probes == "random" and not widths:
            raise InputError("random probes need --rtl for signal widths")
        probes = _probe_set(args.probes, args.count, args.cycles, args.seed, widths, args.clock)
    try:
        result = compare_sets(left, right, probes, params, seed=None if args.probe_vcd else args.seed)
    except UnboundParameter as exc:
        raise InputError(f"generate bound {exc.args[0]} needs --param or --rtl") from None
    for name in result.excluded:
        _err(f"warning: {name} references signals missing from the probes; excluded from behavioral matching")
    print(result.to_json() if args.json else result.table())
    return OK


def cmd_report(args) -> int:
    rows, matches, sessions = [], [], []
    for path in args.session:
        try:
            session = load_session(path)
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
        except SessionError as exc:
            raise InputError(str(exc)) from None
        cfg = session.config
        ref_path = args.reference or cfg.reference
        alt_path = args.alt or cfg.alt
        references = load_assertions(ref_path) if ref_path else []
        alt = load_assertions(alt_path) if alt_path else None
        probes = []
        if alt is not None:
            clock = cfg.clock or "clk"
            probes = _probe_set(cfg.probes, cfg.probe_count, cfg.probe_cycles, cfg.probe_seed,
                                session.inventory.trace_widths(), clock)
        try:
            row, match = build_row(session, references, alt, probes)
        except ValueError as exc:
            raise InputError(f"{path}: {exc}") from None
        if match is not None:
            match.seed = cfg.probe_seed
        rows.append(row)
        matches.append(match)
        sessions.append(session)
    narrative = {s.design: s.config.documented for s in sessions}
    written = write_report(args.out, rows, matches, sessions, narrative)
    for p in written:
        _err(f"wrote {p}")
    if args.json:
        print(json.dumps([dict(zip(("module", "reference", "generated", "alternative", "common", "trace_span"),
                                   r.cells())) for r in rows], indent=2))
    else:
        print(Path(args.out, "report.md").read_text(encoding="utf-8"), end="")
    return OK


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="svaflow", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("extract", help="list the ports, signals and parameters of an RTL module as JSON")
    e.add_argument("rtl")
    e.add_argument("--module")
    e.add_argument("--header-only", action="store_true", help="ports and parameters only")
    e.set_defaults(func=cmd_extract)

    lint = sub.add_parser("lint", help="parse assertions and check them against an RTL inventory")
    lint.add_argument("sva")
    lint.add_argument("--rtl")
    lint.add_argument("--json", action="store_true")
    lint.set_defaults(func=cmd_lint)

    c = sub.add_parser("check", help="evaluate assertions on VCD traces")
    c.add_argument("sva")
    c.add_argument("vcd", nargs="+")
    c.add_argument("--clock", default="clk_i")
    c.add_argument("--rtl", help="RTL for signal checks and parameter values")
    c.add_argument("--param", action="append", metavar="NAME=INT")
    c.add_argument("--json", action="store_true")
    c.add_argument("--junit", metavar="FILE")
    c.add_argument("--jobs", type=int, default=4)
    c.set_defaults(func=cmd_check)

    g = sub.add_parser("gen", help="run the generate / check / repair session")
    g.add_argument("--config")
    g.add_argument("--design")
    g.add_argument("--spec")
    g.add_argument("--rtl")
    g.add_argument("--vcd", nargs="+")
    g.add_argument("--clock")
    g.add_argument("--backend", choices=("replay", "http"))
    g.add_argument("--replay-dir")
    g.add_argument("--max-iter", type=int)
    g.add_argument("--interactive", action="store_true")
    g.add_argument("--param", action="append", metavar="NAME=INT")
    g.add_argument("--out", default="session_out")
    g.add_argument("--resume", action="store_true", help="continue from the log in --out")
    g.add_argument("--json", action="store_true")
    g.set_defaults(func=cmd_gen)

    m = sub.add_parser("compare", help="count functionally common assertions of two sets")
    m.add_argument("left", help=".sva, assertion-set .json or session .jsonl")
    m.add_argument("right")
    m.add_argument("--probes", choices=("random", "rv_timer"), default="random")
    m.add_argument("--probe-vcd", nargs="+")
    m.add_argument("--count", type=int, default=24)
    m.add_argument("--cycles", type=int, default=12)
    m.add_argument("--seed", type=int, default=7)
    m.add_argument("--rtl")
    m.add_argument("--clock", default="clk_i")
    m.add_argument("--param", action="append", metavar="NAME=INT")
    m.add_argument("--json", action="store_true")
    m.set_defaults(func=cmd_compare)

    r = sub.add_parser("report", help="write report.md, report.csv and iterations.csv")
    r.add_argument("--session", nargs="+", required=True)
    r.add_argument("--reference")
    r.add_argument("--alt")
    r.add_argument("--out", default="report_out")
    r.add_argument("--json", action="store_true")
    r.set_defaults(func=cmd_report)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return OK if exc.code == 0 else INPUT_ERROR
    try:
        return args.func(args)
    except InputError as exc:
        _err(f"error: {exc}")
        return INPUT_ERROR
    except ValueError as exc:
        _err(f"error: {exc}")
        return INPUT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
