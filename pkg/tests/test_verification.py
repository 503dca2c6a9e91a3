from __future__ import annotations

from dataclasses import replace

import pytest
from mpmath import mp

from rosen_mediant import verification
from rosen_mediant.planar_extension import witness_orbit
from rosen_mediant.verification import CHECKS, CheckResult, VerificationReport, run_verification

SMALL = {
    "verify": {
        "samples": 2000,
        "rectangles": 20,
        "dual_points": 100,
        "induced_points": 50,
        "orbits": 5,
        "orbit_length": 10,
        "theta_points": 10,
    },
    "orbits": {"depth": 12},
}

CHEAP = ["factorization", "induced_relation", "theta_cross_path", "constants", "witness"]


@pytest.mark.parametrize("k", [5, 8, 9])
def test_cheap_checks_pass(contexts, k: int) -> None:
    report = run_verification(contexts(k), SMALL, seed=3, only=CHEAP)
    assert [c.name for c in report.checks] == CHEAP
    assert report.failures == [], report.as_dict()
    assert report.passed


def test_audit_checks_pass_on_small_samples(ctx8) -> None:
    names = ["bijectivity", "invariance", "dual_equation", "induced_composition", "conjugacy", "theta_formulas"]
    report = run_verification(ctx8, SMALL, seed=3, only=names)
    assert report.passed, report.failures


def test_k4_constants_record_adjudication(ctx4) -> None:
    report = run_verification(ctx4, SMALL, only=["constants"])
    details = report.checks[0].details
    assert "k4_adjudication" in details
    assert "k4_candidates" in details["closed_form"]


def test_report_document(ctx8) -> None:
    document = run_verification(ctx8, SMALL, only=["factorization"]).as_dict()
    assert set(document) == {"schema_version", "k", "passed", "failures", "checks"}
    assert document["k"] == 8
    assert document["checks"][0]["details"]["identities"] == 10


def test_failures_are_collected() -> None:
    report = VerificationReport(8, [CheckResult("a", True), CheckResult("b", False), CheckResult("c", False)])
    assert report.failures == ["b", "c"]
    assert not report.passed


def test_unknown_check_is_rejected(ctx8) -> None:
    with pytest.raises(ValueError):
        run_verification(ctx8, SMALL, only=["factorization", "nope"])


def test_every_check_is_registered() -> None:
    assert set(CHECKS) == {
        "factorization",
        "induced_relation",
        "bijectivity",
        "invariance",
        "dual_equation",
        "induced_composition",
        "conjugacy",
        "theta_formulas",
        "theta_cross_path",
        "constants",
        "witness",
    }


@pytest.mark.parametrize("k", [8, 9])
def test_full_suite_on_small_samples(contexts, k: int) -> None:
    report = run_verification(contexts(k), SMALL)
    assert [c.name for c in report.checks] == list(CHECKS)
    assert report.passed, report.failures


def test_witness_check_reports_the_attained_minimum(ctx8) -> None:
    details = run_verification(ctx8, SMALL, only=["witness"]).checks[0].details
    assert float(details["min_theta"]) == 0.5
    assert details["below_C"] == []
    assert details["equality_indices"]


def test_witness_check_rejects_an_inflated_minimum(ctx8, monkeypatch) -> None:
    orbit = witness_orbit(ctx8)
    inflated = replace(orbit, min_theta=max(orbit.theta_values))
    monkeypatch.setattr(verification, "witness_orbit", lambda ctx, bits: inflated)
    assert run_verification(ctx8, SMALL, only=["witness"]).failures == ["witness"]


def test_witness_check_rejects_theta_below_hurwitz(ctx9, monkeypatch) -> None:
    orbit = witness_orbit(ctx9, 512)
    with mp.workprec(256):
        lowered = (ctx9.hurwitz_C - mp.mpf("0.01"),) + orbit.theta_values[1:]
    monkeypatch.setattr(verification, "witness_orbit", lambda ctx, bits: replace(orbit, theta_values=lowered))
    report = run_verification(ctx9, SMALL, only=["witness"])
    assert report.failures == ["witness"]
    assert report.checks[0].details["below_C"] == [0]
