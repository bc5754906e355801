"""Acceptance criteria, one test each; the summary prints a PASS/FAIL line per criterion."""

import time

import pytest

from klab.suites import LEMMA33_BASES, THM34_PAIRS, SuiteConfig, run_suite

CFG = SuiteConfig(char=32003, stages=12, seed=0, trials=500)


def timed(name, cfg=CFG):
    start = time.perf_counter()
    out = run_suite(name, cfg)
    return out, time.perf_counter() - start


def failures(out):
    return [c["case"] for c in out["cases"] if not c["passed"]]


@pytest.mark.criterion(1, "decomposition of Tor and Ext over B ⋉ Σⁿk")
def test_lemma33_decomposition():
    out, secs = timed("lemma33")
    assert not failures(out), failures(out)
    assert len(out["cases"]) == len(LEMMA33_BASES) * 4
    assert secs < 60, secs


@pytest.mark.criterion(2, "Poincaré series of k over k ⋉ Σⁿk")
def test_poincare_recursion():
    out, _ = timed("poincare")
    assert not failures(out), failures(out)
    coeffs = {c["case"]: c["coeffs"] for c in out["cases"]}
    assert coeffs["n=1"] == [1, 0] * 6 + [1]
    assert coeffs["n=2"] == [1, 0, 0] * 4 + [1]
    assert coeffs["n=3"] == [1, 0, 0, 0] * 3 + [1]


@pytest.mark.criterion(3, "Euler characteristic obstructions")
def test_euler_obstructions():
    out, secs = timed("euler")
    assert not failures(out), failures(out)
    bodies = [c for c in out["cases"] if "body" in c["case"]]
    assert [c["chi"] for c in bodies] == [1, 1]
    assert secs < 5, secs


@pytest.mark.criterion(4, "regular and dualizing modules are semidualizing; biduality")
def test_dualizing_suite():
    out, secs = timed("dualizing")
    assert not failures(out), failures(out)
    for c in out["cases"]:
        assert c["A"]["verdict"] == c["D"]["verdict"] == "Verified"
        assert len(c["biduality"]) == 10
    assert secs < 120, secs


@pytest.mark.criterion(5, "class G(r) algebras are self-dual up to shift")
def test_self_duality():
    out, _ = timed("self-duality")
    assert not failures(out), failures(out)
    assert [c["shift"] for c in out["cases"]] == [3, 3, 3, 3]


@pytest.mark.criterion(6, "semi-free extension with soft truncation")
def test_prop31_construction():
    out, _ = timed("prop31")
    assert not failures(out), failures(out)
    for case in out["cases"]:
        for m in case["modules"]:
            checks = m["checks"]
            assert checks["exact"] and checks["image_in_mL"] and checks["annihilator"]
            assert checks["truncation_quasi_iso"] and checks["finite_semibasis"] > 0


@pytest.mark.criterion(7, "no counterexample to Tor rigidity in 500 trials per pair")
def test_thm34_search():
    out, secs = timed("thm34-search")
    assert not failures(out), [c for c in out["cases"] if not c["passed"]]
    assert len(out["cases"]) == len(THM34_PAIRS)
    assert all(c["trials"] == 500 for c in out["cases"])
    assert secs < 180, secs


@pytest.mark.criterion(8, "classifier recovers every grid point and known rings")
def test_classifier_roundtrip():
    out, secs = timed("table-roundtrip")
    assert not failures(out), out["cases"]
    rings = {r["ring"]: r for r in out["cases"][1]["rings"]}
    assert rings["ci3"]["class"] == "C(3)" and rings["ci3"]["sdc_bound"] == 1
    assert rings["golod2"]["class"] == "S" and rings["golod2"]["sdc_bound"] == 2
    assert rings["x2"]["class"] == "C(1)"
    assert secs < 30, secs


@pytest.mark.criterion(9, "base change along a Koszul complex preserves the verdict")
def test_base_change():
    out, _ = timed("base-change")
    assert not failures(out), failures(out)
    for c in out["cases"]:
        for r in c["reports"]:
            assert r["data"]["B"]["verdict"] == r["data"]["C"]["verdict"] != "Inconclusive"


@pytest.mark.criterion(10, "larger budgets agree on the shared window")
def test_window_soundness():
    out, _ = timed("windows")
    assert not failures(out), failures(out)
    assert all(m["tor"][1] > 0 for c in out["cases"] for m in c["modules"])
