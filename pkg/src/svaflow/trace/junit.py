from __future__ import annotations

import xml.etree.ElementTree as ET
from typing import Sequence

from .model import EvalReport


def junit_xml(reports: Sequence[EvalReport], suite: str = "assertions") -> str:
    """One testcase per assertion; a failing assertion carries its first failure message."""
    root = ET.Element(
        "testsuite",
        name=suite,
        tests=str(len(reports)),
        failures=str(sum(1 for r in reports if r.fails)),
        errors="0",
    )
    for r in reports:
        case = ET.SubElement(root, "testcase", classname=suite, name=r.assertion_name)
        if r.fails:
            fail = ET.SubElement(case, "failure", message=r.first_failure_message or "assertion failed")
            fail.text = f"fails={r.fails} fail_cycles={list(r.fail_cycles)}"
        props = ET.SubElement(case, "system-out")
        props.text = (
            f"attempts={r.attempts} passes={r.passes} vacuous={r.vacuous} "
            f"disabled={r.disabled} incomplete={r.incomplete} unknown_fails={r.unknown_fails}"
        )
    ET.indent(root)
    return ET.tostring(root, encoding="unicode", xml_declaration=True) + "\n"
