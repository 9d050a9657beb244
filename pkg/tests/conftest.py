import sys
from pathlib import Path

import pytest

from svaflow.orchestrator.config import load_config
from svaflow.trace import read_vcd_file

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))

DATA = HERE.parent / "src" / "svaflow" / "data" / "rv_timer"
CORPUS = HERE / "data" / "corpus"


@pytest.fixture(scope="session")
def rv_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def rv_config():
    return load_config(DATA / "session.toml")


@pytest.fixture(scope="session")
def rv_traces(rv_config):
    return [read_vcd_file(p, "clk_i") for p in rv_config.traces]


@pytest.fixture(scope="session")
def rv_rtl() -> str:
    return (DATA / "rv_timer.sv").read_text()


@pytest.fixture(scope="session")
def rv_inventory(rv_rtl):
    from svaflow.verilog import extract_signals

    return extract_signals(rv_rtl)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
