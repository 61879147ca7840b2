import math

from knotbeta.selfcheck import FAIL, PASS, SKIPPED, CheckResult, Part, SelfCheck, _part


def test_part_gating():
    assert _part("x", 1e-7, 1e-6).status == PASS
    assert _part("x", 1e-5, 1e-6).status == FAIL
    assert _part("x", math.nan, 1e-6).status == FAIL


def test_result_status_and_line():
    ok = CheckResult(3, "demo", [Part("a", 1e-8, 1e-6, PASS), Part("b", 5e-7, 1e-6, PASS)])
    assert ok.status == PASS and ok.worst().label == "b"
    assert ok.line().startswith("[PASS]  3 demo  worst b")
    bad = CheckResult(4, "demo", [Part("a", 1e-8, 1e-6, PASS), Part("b", 1.0, 1e-6, FAIL)])
    assert bad.status == FAIL and not bad.passed
    skipped = CheckResult(5, "demo", [Part("a", None, None, SKIPPED, "reason")])
    assert skipped.status == SKIPPED and skipped.passed
    assert "[1 skipped]" in skipped.line()
    assert skipped.to_dict()["parts"][0]["note"] == "reason"


def test_run_selected_criteria():
    results = SelfCheck().run(only={2, 8})
    assert [r.criterion for r in results] == [2, 8]
    assert all(r.passed for r in results)
