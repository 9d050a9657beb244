import random

import pytest

from conftest import CORPUS
from randgen import WIDTHS, rand_assertion
from svaflow import rvtimer
from svaflow.compare import (
    BEHAVIORAL,
    NONE,
    STRUCTURAL,
    MatchVerdict,
    compare_sets,
    load_assertions,
    match_sets,
    random_probes,
    verdict_vector,
)
from svaflow.sva import parse_assertions
from svaflow.trace import Trace


def parse(src):
    asts, diags = parse_assertions(src)
    assert not [d for d in diags if d.is_error]
    return asts


A11 = load_assertions(CORPUS / "compare_11.sva")
A12 = load_assertions(CORPUS / "compare_12.sva")
PROBES = rvtimer.probe_traces()


def test_verdict_vector_determinism_and_tautology():
    v = verdict_vector(A11[0], PROBES)
    assert len(v) == len(PROBES) and v == verdict_vector(A11[0], PROBES)
    taut = parse("assert property (@(posedge clk_i) 1 |-> 1);")[0]
    assert all(fails == 0 for _, fails, _ in verdict_vector(taut, PROBES))
    with pytest.raises(ValueError):
        verdict_vector(taut, [])


def test_assertions_11_and_12_match_behaviorally():
    count, pairs = match_sets(A11, A12, PROBES)
    assert count == 1
    assert pairs[0].kind == BEHAVIORAL and pairs[0].label == "probe-consistent"
    assert pairs[0].probe_agreement == 1.0


def test_unaligned_probes_split_11_and_12():
    # when reset or active drop mid-attempt the two guard styles disagree
    unaligned = rvtimer.probe_traces(aligned=False, seed=3)
    assert match_sets(A11, A12, unaligned)[0] == 0


def test_identical_sets_are_structural():
    text = (CORPUS / "rv_timer_raw_1_3.sva").read_text()
    left, right = parse(text), parse(text)
    count, pairs = match_sets(left, right, PROBES, {"N": 2})
    assert count == 3 and all(p.kind == STRUCTURAL and p.probe_agreement == 1.0 for p in pairs)


def test_disjoint_signals():
    left = parse("assert property (@(posedge clk) a |-> b);")
    right = parse("assert property (@(posedge clk) x |=> y);")
    probes = random_probes({"a": 1, "b": 1, "x": 1, "y": 1}, count=10, seed=3)
    assert match_sets(left, right, probes)[0] == 0


def test_missing_signals_are_excluded():
    left = parse("assert property (@(posedge clk_i) active |-> not_there);")
    result = compare_sets(left, A12, PROBES)
    assert result.count == 0 and result.excluded == ["assert_1"]


def test_match_verdict_validation():
    with pytest.raises(ValueError):
        MatchVerdict("a", "b", "fuzzy")
    with pytest.raises(ValueError):
        MatchVerdict("a", "b", BEHAVIORAL, 1.5)
    assert MatchVerdict("a", None, NONE).label == "-"


def test_curated_rv_timer_sets(rv_dir):
    final = load_assertions(rv_dir / "alt_assertions.sva")
    assert len(final) == 11


def test_symmetry_and_behavioral_exactness():
    rng = random.Random(8)
    probes = [Trace.from_columns({n: [rng.randrange(1 << w) for _ in range(6)] for n, w in WIDTHS.items()},
                                 widths=WIDTHS) for _ in range(8)]
    for _ in range(60):
        left = [rand_assertion(rng) for _ in range(rng.randint(1, 4))]
        right = [rand_assertion(rng) for _ in range(rng.randint(1, 4))]
        right += rng.sample(left, rng.randint(0, len(left)))
        left = [a.__class__(f"l{i}", *[getattr(a, f) for f in ("clock", "body", "disable")]) for i, a in enumerate(left)]
        right = [a.__class__(f"r{i}", *[getattr(a, f) for f in ("clock", "body", "disable")]) for i, a in enumerate(right)]
        fwd = compare_sets(left, right, probes)
        back = compare_sets(right, left, probes)
        assert fwd.count == back.count
        by_name = {a.name: a for a in left + right}
        for p in fwd.pairs:
            if p.kind == BEHAVIORAL:
                assert verdict_vector(by_name[p.left], probes) == verdict_vector(by_name[p.right], probes)
            if p.kind == STRUCTURAL:
                assert p.probe_agreement == 1.0


def test_match_result_outputs():
    result = compare_sets(A11, A12, PROBES, seed=7)
    d = result.to_dict()
    assert d["count"] == 1 and d["seed"] == 7 and d["probes"] == len(PROBES)
    assert "probe-consistent" in result.table()


def test_random_probes_are_seeded():
    a = random_probes({"rst_ni": 1, "v": 4}, count=5, seed=2)
    b = random_probes({"rst_ni": 1, "v": 4}, count=5, seed=2)
    assert a == b and a[0].values["rst_ni"][0] == 0


def test_load_assertions_errors(tmp_path):
    bad = tmp_path / "bad.sva"
    bad.write_text("property p; @(posedge clk) (a &&; endproperty assert property(p);")
    with pytest.raises(ValueError):
        load_assertions(bad)
