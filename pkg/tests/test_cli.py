import json
import xml.etree.ElementTree as ET

import pytest

from conftest import CORPUS, DATA
from svaflow.cli import main
from svaflow.sva import load_assertion_set

RTL = str(DATA / "rv_timer.sv")
VCDS = [str(DATA / "tb_count.vcd"), str(DATA / "tb_intr.vcd")]
CONFIG = str(DATA / "session.toml")


@pytest.fixture
def final_sva(tmp_path):
    parts = [(CORPUS / n).read_text() for n in ("rv_timer_modified_1.sva", "rv_timer_modified_2.sva")]
    p = tmp_path / "modified.sva"
    p.write_text("\n".join(parts))
    return str(p)


def test_extract(capsys):
    assert main(["extract", RTL]) == 0
    inv = json.loads(capsys.readouterr().out)
    names = [s["name"] for s in inv["signals"]]
    assert names[0] == "clk_i" and "intr" in names


def test_extract_missing_file(capsys):
    assert main(["extract", "missing.sv"]) == 2
    assert "missing.sv" in capsys.readouterr().err


def test_extract_empty_module(tmp_path, capsys):
    p = tmp_path / "empty_module.sv"
    p.write_text("module empty_module(); endmodule\n")
    assert main(["extract", str(p)]) == 0
    assert json.loads(capsys.readouterr().out)["signals"] == []


def test_usage_error(capsys):
    assert main(["frobnicate"]) == 2
    assert main([]) == 2


def test_lint(final_sva, tmp_path, capsys):
    assert main(["lint", final_sva, "--rtl", RTL]) == 0
    assert "2 assertions, 0 errors" in capsys.readouterr().out
    bad = tmp_path / "bad.sva"
    bad.write_text("assert property (@(posedge clk_i) active |-> msg_fifo_reqq);")
    assert main(["lint", str(bad), "--rtl", RTL, "--json"]) == 2
    out = capsys.readouterr()
    assert "UnknownSignal" in out.err
    assert "UnknownSignal" in {d["code"] for d in json.loads(out.out)["diagnostics"]}


def test_check_passing(final_sva, tmp_path, capsys):
    junit = tmp_path / "r.xml"
    assert main(["check", final_sva, *VCDS, "--rtl", RTL, "--json", "--junit", str(junit)]) == 0
    reports = json.loads(capsys.readouterr().out)
    assert [r["assertion_name"] for r in reports] == ["tick_count_reset", "tick_generate"]
    assert all(r["fails"] == 0 and r["passes"] > 0 for r in reports)
    assert ET.parse(junit).getroot().get("failures") == "0"


def test_check_raw_assertion_1_fails(tmp_path, capsys):
    raw = (CORPUS / "rv_timer_raw_1_3.sva").read_text().split("property tick_generate")[0]
    p = tmp_path / "raw1.sva"
    p.write_text(raw)
    assert main(["check", str(p), VCDS[0], "--rtl", RTL]) == 1
    err = capsys.readouterr().err
    assert "tick_count_reset failed" in err and "at cycle 13" in err


def test_check_unknown_signal(tmp_path, capsys):
    p = tmp_path / "u.sva"
    p.write_text("assert property (@(posedge clk_i) active |-> hmac_ena);")
    assert main(["check", str(p), VCDS[0], "--rtl", RTL]) == 2
    assert "UnknownSignal" in capsys.readouterr().err


def test_check_without_rtl_uses_trace_signals(final_sva, capsys):
    assert main(["check", final_sva, VCDS[0]]) == 0


def test_check_generate_needs_parameter(tmp_path, capsys):
    p = tmp_path / "g.sva"
    p.write_text((CORPUS / "rv_timer_4_7.sva").read_text())
    assert main(["check", str(p), VCDS[0]]) == 2
    assert "--param" in capsys.readouterr().err


def test_check_bad_vcd(final_sva, tmp_path, capsys):
    p = tmp_path / "bad.vcd"
    p.write_text("$var wire 1 ! clk_i $end\n$enddefinitions $end\n#0\n0!\n")
    assert main(["check", final_sva, str(p)]) == 2


def test_gen_replay(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["gen", "--config", CONFIG, "--out", str(out), "--json"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert len(rows) == 7 and all(r["status"] == "passing" for r in rows)
    assert len(load_assertion_set((out / "assertions.json").read_text())) == 7
    assert (out / "session.jsonl").exists() and (out / "assertions.sva").exists()
    # resume is a no-op on a finished log
    before = (out / "session.jsonl").read_text()
    assert main(["gen", "--config", CONFIG, "--out", str(out), "--resume"]) == 0
    assert (out / "session.jsonl").read_text() == before


def test_gen_max_iter(tmp_path, capsys):
    assert main(["gen", "--config", CONFIG, "--out", str(tmp_path), "--max-iter", "1", "--json"]) == 1
    rows = {r["assertion"]: r for r in json.loads(capsys.readouterr().out)}
    assert rows["tick_generate"]["status"] == "abandoned"


def test_gen_http_without_credential(tmp_path, monkeypatch, capsys):
    monkeypatch.delenv("SVAFLOW_API_KEY", raising=False)
    assert main(["gen", "--config", CONFIG, "--out", str(tmp_path), "--backend", "http"]) == 3
    assert "SVAFLOW_API_KEY" in capsys.readouterr().err


def test_gen_missing_inputs(tmp_path, capsys):
    assert main(["gen", "--out", str(tmp_path)]) == 2


def test_gen_interactive(tmp_path, monkeypatch, capsys):
    answers = iter(["", "", "", "", ""])
    monkeypatch.setattr("builtins.input", lambda *a: next(answers))
    assert main(["gen", "--config", CONFIG, "--out", str(tmp_path), "--interactive"]) == 0
    monkeypatch.setattr("builtins.input", lambda *a: "q")
    assert main(["gen", "--config", CONFIG, "--out", str(tmp_path / "q"), "--interactive"]) == 2


def test_compare_and_report(tmp_path, capsys):
    out = tmp_path / "gen"
    assert main(["gen", "--config", CONFIG, "--out", str(out)]) == 0
    capsys.readouterr()
    assert main(["compare", str(out / "assertions.json"), str(DATA / "alt_assertions.sva"),
                 "--probes", "rv_timer"]) == 2
    assert "--param" in capsys.readouterr().err
    assert main(["compare", str(out / "assertions.json"), str(DATA / "alt_assertions.sva"),
                 "--probes", "rv_timer", "--rtl", RTL, "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["count"] == 5
    assert main(["compare", str(out / "session.jsonl"), str(DATA / "alt_assertions.sva"),
                 "--probes", "rv_timer"]) == 0
    assert "common: 5" in capsys.readouterr().out
    rep = tmp_path / "rep"
    assert main(["report", "--session", str(out / "session.jsonl"), "--out", str(rep), "--json"]) == 0
    row = json.loads(capsys.readouterr().out)[0]
    assert row["generated"] == "7" and row["alternative"] == "11" and row["common"] == "5"
    assert {p.name for p in rep.iterdir()} == {"report.md", "report.csv", "iterations.csv"}


def test_compare_random_needs_rtl(tmp_path, capsys):
    assert main(["compare", str(CORPUS / "compare_11.sva"), str(CORPUS / "compare_12.sva")]) == 2
    assert main(["compare", str(CORPUS / "compare_11.sva"), str(CORPUS / "compare_12.sva"),
                 "--rtl", RTL, "--json"]) == 0


def test_report_missing_session(tmp_path, capsys):
    assert main(["report", "--session", str(tmp_path / "nope.jsonl"), "--out", str(tmp_path)]) == 2
