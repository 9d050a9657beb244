from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Mapping, Sequence



class TraceError(ValueError):
    pass


class ClockNotFound(TraceError):
    pass


class MalformedVcd(TraceError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class NoEdges(TraceError):
    pass


class SignalMissingFromTrace(TraceError):
    def __init__(self, name: str, trace_name: str = ""):
        self.name = name
        where = f" in trace {trace_name}" if trace_name else ""
        super().__init__(f"signal '{name}' not found{where}")


class ClockMismatch(TraceError):
    pass


class InstanceTooLarge(ValueError):
    pass


@dataclass(frozen=True, eq=True)
class Trace:
    """Per-cycle samples of every signal at the rising edges of ``clock``.

    ``values[name][k]`` is the value the signal held just before
    ``edge_times[k]`` (preponed sampling). ``None`` marks x/z.
    """

    clock: str
    edge_times: tuple[int, ...]
    values: Mapping[str, tuple]
    widths: Mapping[str, int] = field(default_factory=dict)
    timescale: str = "1ns"
    name: str = ""

    def __post_init__(self):
        k = len(self.edge_times)
        if any(b <= a for a, b in zip(self.edge_times, self.edge_times[1:])):
            raise ValueError("edge_times must be strictly increasing")
        for sig, series in self.values.items():
            if len(series) != k:
                raise ValueError(f"signal {sig!r} has {len(series)} samples, expected {k}")

    @property
    def cycles(self) -> int:
        return len(self.edge_times)

    @property
    def span(self) -> int:
        return self.edge_times[-1] - self.edge_times[0] if self.edge_times else 0

    def __contains__(self, name: str) -> bool:
        return name in self.values

    def width(self, name: str) -> int:
        return self.widths.get(name, 1)

    def has_base(self, name: str) -> bool:
        """True when ``name`` exists as a signal or as an element family ``name[i]``."""
        if name in self.values:
            return True
        prefix = name + "["
        return any(key.startswith(prefix) for key in self.values)

    @classmethod
    def from_columns(
        cls,
        columns: Mapping[str, Sequence],
        clock: str = "clk",
        widths: Mapping[str, int] | None = None,
        period: int = 10,
        name: str = "",
    ) -> "Trace":
        """Build a trace from per-cycle columns; edges at ``period, 2*period, ...``."""
        lengths = {len(v) for v in columns.values()}
        if len(lengths) > 1:
            raise ValueError("all columns must have the same length")
        k = lengths.pop() if lengths else 0
        values = {n: tuple(v) for n, v in columns.items()}
        if clock not in values:
            values[clock] = tuple([0] * k)
        return cls(clock, tuple(period * (i + 1) for i in range(k)), values, dict(widths or {}), name=name)


@dataclass(frozen=True)
class EvalReport:
    assertion_name: str
    attempts: int = 0
    passes: int = 0
    fails: int = 0
    vacuous: int = 0
    disabled: int = 0
    incomplete: int = 0
    fail_cycles: tuple[int, ...] = ()
    unknown_fails: int = 0  # fails where a referenced signal was x/z inside the attempt window
    first_failure_message: str | None = None

    def __post_init__(self):
        if self.attempts != self.passes + self.fails + self.vacuous + self.disabled + self.incomplete:
            raise ValueError("attempt counts do not add up")
        if len(self.fail_cycles) != self.fails:
            raise ValueError("fail_cycles must list one cycle per failure")

    @property
    def ok(self) -> bool:
        return self.fails == 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["fail_cycles"] = list(self.fail_cycles)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False)

    @classmethod
    def from_dict(cls, d: dict) -> "EvalReport":
        d = dict(d)
        d["fail_cycles"] = tuple(d.get("fail_cycles", ()))
        return cls(**d)

    @classmethod
    def merge(cls, name: str, reports: Sequence["EvalReport"]) -> "EvalReport":
        """Sum the counts of several reports (e.g. one per trace or per generate index)."""
        message = next((r.first_failure_message for r in reports if r.first_failure_message), None)
        fail_cycles: list[int] = []
        for r in reports:
            fail_cycles.extend(r.fail_cycles)
        return cls(
            assertion_name=name,
            attempts=sum(r.attempts for r in reports),
            passes=sum(r.passes for r in reports),
            fails=sum(r.fails for r in reports),
            vacuous=sum(r.vacuous for r in reports),
            disabled=sum(r.disabled for r in reports),
            incomplete=sum(r.incomplete for r in reports),
            fail_cycles=tuple(fail_cycles),
            unknown_fails=sum(r.unknown_fails for r in reports),
            first_failure_message=message,
        )


def failure_message(assertion: str, what: str, detected: int, started: int, time: int, trace_name: str = "") -> str:
    where = f" in {trace_name}" if trace_name else ""
    return (
        f"Assertion {assertion} failed{where} at cycle {detected} (time {time}): {what} did not hold "
        f"for the attempt started at cycle {started}"
    )
