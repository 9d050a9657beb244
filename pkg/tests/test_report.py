import csv
import io

import pytest

from session_util import DATA, run_rv_timer
from svaflow import rvtimer
from svaflow.compare import load_assertions
from svaflow.report import (
    DesignRow,
    SessionIncomplete,
    build_row,
    iteration_histogram,
    render_csv,
    render_markdown,
    write_report,
)


@pytest.fixture(scope="module")
def session(tmp_path_factory):
    return run_rv_timer(tmp_path_factory.mktemp("r") / "session.jsonl")


@pytest.fixture(scope="module")
def alt():
    return load_assertions(DATA / "alt_assertions.sva")


def test_row_invariants():
    with pytest.raises(ValueError):
        DesignRow("m", 0, 2, 3, 4, 10)
    with pytest.raises(ValueError):
        DesignRow("m", -1, 2, None, None, 10)
    assert DesignRow("m", 1, 2, None, None, 10).cells() == ["m", "1", "2", "—", "—", "10"]


def test_build_row_rv_timer(session, alt):
    row, match = build_row(session, [], alt, rvtimer.probe_traces())
    assert (row.generated_assert_count, row.alt_assert_count, row.common_assert_count) == (7, 11, 5)
    assert row.trace_time_span == 230 and row.reference_assert_count == 0


def test_build_row_without_alt(session):
    row, match = build_row(session, [], None, [])
    assert match is None and row.cells()[3:5] == ["—", "—"]


def test_incomplete_session_rejected(session):
    from dataclasses import replace

    with pytest.raises(SessionIncomplete):
        build_row(replace(session, completed=False), [], None, [])


def test_zero_passing(session):
    from dataclasses import replace

    empty = replace(session, assertions={})
    row, _ = build_row(empty, [], None, [])
    assert row.generated_assert_count == 0


def test_markdown_and_csv_agree(session, alt):
    row, match = build_row(session, [], alt, rvtimer.probe_traces())
    md = render_markdown([row], [match])
    table_line = next(line for line in md.splitlines() if line.startswith("| rv_timer"))
    md_cells = [c.strip() for c in table_line.strip("|").split("|")]
    csv_cells = list(csv.reader(io.StringIO(render_csv([row]))))[1]
    assert md_cells == csv_cells
    assert "measured locally" in md


def test_iteration_histogram(session):
    text = iteration_histogram([session], narrative={"rv_timer": ["tick_count_reset", "tick_generate",
                                                                  "tick_count_increment"]})
    rows = list(csv.DictReader(io.StringIO(text)))
    by = {r["assertion"]: r for r in rows}
    assert (by["tick_count_reset"]["iterations"], by["tick_generate"]["iterations"],
            by["tick_count_increment"]["iterations"]) == ("1", "3", "0")
    assert by["tick_generate"]["provenance"] == "documented"
    assert by["update_mtime_d"]["provenance"] == "fixture"
    assert by["TOTAL"]["iterations"] == "5"
    assert iteration_histogram([]) == "design,tool,assertion,iterations,status,provenance\n"


def test_all_zero_iterations(session):
    from dataclasses import replace

    zero = {n: replace(s, iterations_used=0) for n, s in session.assertions.items()}
    text = iteration_histogram([replace(session, assertions=zero)])
    assert text.strip().splitlines()[-1] == "rv_timer,generated,TOTAL,0,,"


def test_write_report(session, alt, tmp_path):
    row, match = build_row(session, [], alt, rvtimer.probe_traces())
    paths = write_report(tmp_path, [row], [match], [session])
    assert sorted(p.name for p in paths) == ["iterations.csv", "report.csv", "report.md"]
    first = {p.name: p.read_bytes() for p in paths}
    write_report(tmp_path, [row], [match], [session])
    assert first == {p.name: p.read_bytes() for p in paths}
