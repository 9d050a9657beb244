"""Cycle model of the bundled timer core and stimulus generators for it.

The model produces the waveform a simulator would dump for
``data/rv_timer/rv_timer.sv`` plus the surrounding ``mtime`` register:

* inputs for cycle ``k`` change at the falling edge before rising edge ``k``;
* registers take their next value at the rising edge itself, so the
  preponed sample at edge ``k`` sees the pre-update value.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .trace.model import Trace
from .trace.vcd import VcdWriter, ingest_vcd

HALF_PERIOD = 5
WIDTHS = {"prescaler": 12, "step": 8, "tick_count": 12, "mtime": 64, "mtime_d": 64}
_MASK64 = (1 << 64) - 1


@dataclass
class Stimulus:
    """Per-cycle input values. Scalars in ``prescaler``/``step`` apply to every cycle."""

    rst_ni: Sequence[int]
    active: Sequence[int]
    prescaler: int | Sequence[int] = 2
    step: int | Sequence[int] = 1
    mtimecmp: Sequence[int] = (4, 9)
    name: str = ""

    def __post_init__(self):
        if len(self.rst_ni) != len(self.active):
            raise ValueError("rst_ni and active must have the same length")

    @property
    def cycles(self) -> int:
        return len(self.rst_ni)

    def at(self, what: str, k: int) -> int:
        v = getattr(self, what)
        return v if isinstance(v, int) else v[k]


def simulate_rows(stim: Stimulus) -> list[dict[str, int]]:
    """Sampled values of every signal at each rising edge."""
    tick_count, mtime = 0, 0
    rows = []
    harts = len(stim.mtimecmp)
    for k in range(stim.cycles):
        rst, act = stim.rst_ni[k], stim.active[k]
        pre, step = stim.at("prescaler", k), stim.at("step", k)
        tick = int(bool(act) and tick_count >= pre)
        intr = 0
        for t, cmp in enumerate(stim.mtimecmp):
            if act and mtime >= cmp:
                intr |= 1 << t
        row = {
            "rst_ni": rst, "active": act, "prescaler": pre, "step": step,
            "tick": tick, "tick_count": tick_count, "mtime": mtime,
            "mtime_d": (mtime + step) & _MASK64, "intr": intr,
        }
        for t in range(harts):
            row[f"mtimecmp[{t}]"] = stim.mtimecmp[t]
        rows.append(row)
        # register updates at the rising edge
        if not rst or not act or tick_count >= pre:
            tick_count = 0
        else:
            tick_count += 1
        if not rst:
            mtime = 0
        elif tick:
            mtime = (mtime + step) & _MASK64
    return rows


def _widths(harts: int) -> dict[str, int]:
    widths = {"clk_i": 1, "rst_ni": 1, "active": 1, "tick": 1, "intr": harts, **WIDTHS}
    for t in range(harts):
        widths[f"mtimecmp[{t}]"] = 64
    return widths


def simulate_vcd(stim: Stimulus, timescale: str = "1ns") -> str:
    rows = simulate_rows(stim)
    harts = len(stim.mtimecmp)
    widths = _widths(harts)
    inputs = ["rst_ni", "active", "prescaler", "step"] + [f"mtimecmp[{t}]" for t in range(harts)]
    w = VcdWriter(timescale, scope="timer_core")
    for name, width in widths.items():
        w.declare(name, width)
    w.change(0, "clk_i", 0)
    for k, row in enumerate(rows):
        fall = 2 * HALF_PERIOD * k
        rise = fall + HALF_PERIOD
        w.change(fall, "clk_i", 0)
        for name in inputs + ["tick", "mtime_d", "intr"]:
            w.change(fall, name, row[name])
        if k == 0:
            w.change(0, "tick_count", row["tick_count"])
            w.change(0, "mtime", row["mtime"])
        w.change(rise, "clk_i", 1)
        if k + 1 < len(rows):
            nxt = rows[k + 1]
            w.change(rise, "tick_count", nxt["tick_count"])
            w.change(rise, "mtime", nxt["mtime"])
    return w.render()


def simulate(stim: Stimulus) -> Trace:
    return ingest_vcd(simulate_vcd(stim), "clk_i", name=stim.name)


# --------------------------------------------------------------------------
# stimulus generators


def _aligned_level(rng, level: int, tick_count_ready: bool, toggle: float) -> int:
    """Next level of a control input.

    Deassertion is only taken right after a cycle whose tick_count has reached
    the prescaler, so a deassertion never cuts an increment step in half.
    """
    if rng.random() >= toggle:
        return level
    if level == 0:
        return 1
    return 0 if tick_count_ready else 1


def random_stimulus(
    rng: random.Random,
    cycles: int = 12,
    toggle: float = 0.3,
    aligned: bool = True,
    harts: int = 2,
    name: str = "",
) -> Stimulus:
    """Random control toggling with per-trace prescaler, step and compare values.

    With ``aligned`` set, ``rst_ni`` and ``active`` only fall after a cycle in
    which ``tick_count >= prescaler``.
    """
    prescaler = rng.randint(1, 3)
    step = rng.randint(1, 3)
    mtimecmp = tuple(rng.randint(0, 12) for _ in range(harts))
    rst = [1 if rng.random() < 0.8 else 0]
    act = [1 if rng.random() < 0.7 else 0]
    tick_count = 0
    for k in range(1, cycles):
        ready = tick_count >= prescaler
        if aligned:
            rst.append(_aligned_level(rng, rst[-1], ready, toggle))
            act.append(_aligned_level(rng, act[-1], ready, toggle))
        else:
            rst.append(rst[-1] ^ (rng.random() < toggle))
            act.append(act[-1] ^ (rng.random() < toggle))
        # tick_count at cycle k, from cycle k-1 inputs
        if not rst[k - 1] or not act[k - 1] or tick_count >= prescaler:
            tick_count = 0
        else:
            tick_count += 1
    return Stimulus(rst, act, prescaler, step, mtimecmp, name)


def probe_traces(count: int = 24, cycles: int = 12, seed: int = 7, toggle: float = 0.3, aligned: bool = True):
    """Seeded probe traces, led by two directed reset/active sequences."""
    rng = random.Random(seed)
    directed = [
        Stimulus([0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1][:cycles], [1] * cycles, 2, 1, (2, 6), "probe_reset"),
        Stimulus([1] * cycles, [0, 1, 1, 1, 1, 1, 1, 0, 0, 1, 1, 1][:cycles], 1, 2, (3, 8), "probe_active"),
    ]
    stims = directed[:count]
    while len(stims) < count:
        stims.append(random_stimulus(rng, cycles, toggle, aligned, name=f"probe_{len(stims)}"))
    return [simulate(s) for s in stims]


def fixture_stimuli() -> list[Stimulus]:
    """Directed stimuli behind the bundled ``tb_*.vcd`` traces."""
    return [
        Stimulus(
            rst_ni=[0, 0] + [1] * 22,
            active=[1] * 13 + [0] * 3 + [1] * 8,
            prescaler=2, step=1, mtimecmp=(3, 6), name="tb_count",
        ),
        Stimulus(
            rst_ni=[1] * 9 + [0] + [1] * 10,
            active=[0] + [1] * 5 + [0, 1, 1, 1, 1, 1, 1, 1, 0, 1, 1, 1, 1, 1],
            prescaler=1, step=3, mtimecmp=(2, 7), name="tb_intr",
        ),
    ]
