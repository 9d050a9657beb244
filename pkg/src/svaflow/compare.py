"""Decide which assertions of two sets check the same behaviour.

Two assertions match *structurally* when their normalized ASTs are equal, and
*behaviorally* when they produce identical verdict vectors on every probe
trace. Behavioral matches are only probe-consistent, not proven equivalent.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Mapping, Sequence

from .sva.ast import AssertionAst
from .sva.parser import parse_assertions
from .sva.serialize import load_assertion_set
from .sva.transform import expand_generate, normalize
from .trace.evaluate import evaluate
from .trace.model import SignalMissingFromTrace, Trace

STRUCTURAL = "structural"
BEHAVIORAL = "behavioral"
NONE = "none"

Triple = tuple[int, int, int]


@dataclass(frozen=True)
class MatchVerdict:
    left: str
    right: str | None
    kind: str
    probe_agreement: float | None = None

    def __post_init__(self):
        if self.kind not in (STRUCTURAL, BEHAVIORAL, NONE):
            raise ValueError(f"bad match kind {self.kind!r}")
        if self.probe_agreement is not None and not 0.0 <= self.probe_agreement <= 1.0:
            raise ValueError("probe_agreement must lie in [0, 1]")

    @property
    def label(self) -> str:
        return {STRUCTURAL: "structural", BEHAVIORAL: "probe-consistent", NONE: "-"}[self.kind]


@dataclass
class MatchResult:
    count: int
    pairs: list[MatchVerdict]
    unmatched_left: list[str]
    unmatched_right: list[str]
    excluded: list[str]  # assertions that could not be evaluated on the probes
    probes: int
    seed: int | None = None

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "pairs": [asdict(p) for p in self.pairs],
            "unmatched_left": self.unmatched_left,
            "unmatched_right": self.unmatched_right,
            "excluded": self.excluded,
            "probes": self.probes,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def table(self) -> str:
        rows = [("left", "right", "match", "agreement")]
        for p in self.pairs:
            agreement = "-" if p.probe_agreement is None else f"{p.probe_agreement:.2f}"
            rows.append((p.left, p.right or "-", p.label, agreement))
        widths = [max(len(r[i]) for r in rows) for i in range(4)]
        lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
        lines.insert(1, "  ".join("-" * w for w in widths))
        lines.append("")
        lines.append(f"common: {self.count} (probes: {self.probes}, seed: {self.seed})")
        if self.excluded:
            lines.append(f"excluded (not evaluable on probes): {', '.join(self.excluded)}")
        return "\n".join(lines)


def verdict_vector(
    ast: AssertionAst, probes: Sequence[Trace], parameters: Mapping[str, int] | None = None
) -> list[Triple]:
    """(passes, fails, vacuous + disabled) per probe, per generate copy.

    Disabled attempts are counted with the vacuous ones, so a ``disable iff``
    guard and the same condition written into the antecedent can agree.
    """
    if not probes:
        raise ValueError("at least one probe trace is required")
    out = []
    for copy in expand_generate(ast, parameters):
        for trace in probes:
            r = evaluate(copy, trace)
            out.append((r.passes, r.fails, r.vacuous + r.disabled))
    return out


def structural_key(ast: AssertionAst) -> AssertionAst:
    """Normalized form with the name-like fields blanked."""
    generate = ast.generate and replace(ast.generate, label=None)
    return normalize(replace(ast, name="_", origin="manual", generate=generate))


def match_sets(
    left: Sequence[AssertionAst],
    right: Sequence[AssertionAst],
    probes: Sequence[Trace],
    parameters: Mapping[str, int] | None = None,
) -> tuple[int, list[MatchVerdict]]:
    """Number of common assertions and the per-left-assertion verdicts."""
    result = compare_sets(left, right, probes, parameters)
    return result.count, result.pairs


def compare_sets(
    left: Sequence[AssertionAst],
    right: Sequence[AssertionAst],
    probes: Sequence[Trace],
    parameters: Mapping[str, int] | None = None,
    seed: int | None = None,
) -> MatchResult:
    """Greedy matching: structural pairs first, then behavioral, in declaration order.

    Both relations are equivalences, so the greedy count is maximal and does
    not depend on which side is called left.
    """
    lkeys = [structural_key(a) for a in left]
    rkeys = [structural_key(a) for a in right]
    taken_l: dict[int, MatchVerdict] = {}
    taken_r: set[int] = set()

    vectors: dict[tuple[str, int], list[Triple] | None] = {}
    excluded: list[str] = []

    def vector(side: str, i: int, ast: AssertionAst):
        key = (side, i)
        if key not in vectors:
            try:
                vectors[key] = verdict_vector(ast, probes, parameters) if probes else None
            except SignalMissingFromTrace:
                vectors[key] = None
                excluded.append(ast.name)
        return vectors[key]

    for i, lk in enumerate(lkeys):
        for j, rk in enumerate(rkeys):
            if j not in taken_r and lk == rk:
                agreement = None
                if probes:
                    lv, rv = vector("l", i, left[i]), vector("r", j, right[j])
                    if lv is not None and rv is not None:
                        agreement = _agreement(lv, rv)
                taken_l[i] = MatchVerdict(left[i].name, right[j].name, STRUCTURAL, agreement)
                taken_r.add(j)
                break

    if probes:
        for i, a in enumerate(left):
            if i in taken_l:
                continue
            lv = vector("l", i, a)
            if lv is None:
                continue
            for j, b in enumerate(right):
                if j in taken_r:
                    continue
                rv = vector("r", j, b)
                if rv is not None and rv == lv:
                    taken_l[i] = MatchVerdict(a.name, b.name, BEHAVIORAL, 1.0)
                    taken_r.add(j)
                    break

    pairs = [taken_l.get(i) or MatchVerdict(a.name, None, NONE) for i, a in enumerate(left)]
    return MatchResult(
        count=len(taken_r),
        pairs=pairs,
        unmatched_left=[a.name for i, a in enumerate(left) if i not in taken_l],
        unmatched_right=[b.name for j, b in enumerate(right) if j not in taken_r],
        excluded=sorted(set(excluded)),
        probes=len(probes),
        seed=seed,
    )


def _agreement(a: list[Triple], b: list[Triple]) -> float:
    if len(a) != len(b) or not a:
        return 0.0
    return sum(x == y for x, y in zip(a, b)) / len(a)


# --------------------------------------------------------------------------
# probes and inputs


def random_probes(
    widths: Mapping[str, int],
    count: int = 20,
    cycles: int = 12,
    seed: int = 1,
    toggle: float = 0.3,
    clock: str = "clk",
) -> list[Trace]:
    """Seeded random traces over the given signals.

    1-bit signals toggle with probability ``toggle`` per cycle, wider ones
    take a fresh random value with the same probability. Signals whose name
    looks like an active-low reset start low, so every probe set exercises a
    reset release.
    """
    rng = random.Random(seed)
    probes = []
    for n in range(count):
        cols: dict[str, list[int]] = {}
        for name, width in widths.items():
            top = (1 << min(width, 8)) - 1
            if width == 1:
                v = 0 if name.startswith("rst") and n % 2 == 0 else rng.randint(0, 1)
            else:
                v = rng.randint(0, top)
            col = []
            for _ in range(cycles):
                col.append(v)
                if rng.random() < toggle:
                    v = 1 - v if width == 1 else rng.randint(0, top)
            cols[name] = col
        probes.append(Trace.from_columns(cols, clock=clock, widths=dict(widths), name=f"probe_{n}"))
    return probes


def load_assertions(path: Path | str) -> list[AssertionAst]:
    """Assertion set from a JSON file or from SVA source (parse errors raise)."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        return load_assertion_set(text)
    asts, diags = parse_assertions(text, origin="manual")
    errors = [d for d in diags if d.is_error]
    if errors:
        raise ValueError(f"{path}: " + "; ".join(str(d) for d in errors))
    return asts
