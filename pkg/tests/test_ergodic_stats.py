from __future__ import annotations

import numpy as np
import pytest
from mpmath import mp

from rosen_mediant.algebraic_ring import ProjectivePoint
from rosen_mediant.errors import InsufficientLinearRegionError, OutOfIntervalError
from rosen_mediant.ergodic_stats import (
    _mediant_thetas,
    _rosen_orbit,
    borel_frequency,
    breakpoint_estimate,
    count_small_theta,
    enumerate_gk_rationals,
    find_legendre_counterexample,
    legendre_audit,
    lyapunov_entropy,
    merge_counts,
    orbit_rng,
    random_counting,
    rosen_counting,
    witness_theta_hits,
)
from rosen_mediant.hecke_context import closed_form_constants
from rosen_mediant.rosen_maps import Digit, convergents

GRID = [0.1, 0.25, 0.5, 0.75, 1.0, 2.0]


def test_orbit_rng_is_keyed_by_seed_and_orbit() -> None:
    a = orbit_rng(3, 0).random(4)
    assert np.array_equal(a, orbit_rng(3, 0).random(4))
    assert not np.array_equal(a, orbit_rng(3, 1).random(4))
    assert not np.array_equal(a, orbit_rng(4, 0).random(4))


# ---------------------------------------------------------------------------
# Counting
# ---------------------------------------------------------------------------

def test_count_small_theta_float(ctx8) -> None:
    report = count_small_theta(ctx8, 0.3, 2000, GRID)
    assert report.N == 2000
    assert not report.terminated
    assert np.all(np.diff(report.counts) >= 0)
    assert report.counts[-1] <= report.N
    assert 0 < report.rosen_steps < report.N
    assert np.all(report.rosen_counts <= report.counts)
    rows = report.rows()
    assert [row["t"] for row in rows] == GRID
    assert rows[2]["count_over_N"] == pytest.approx(report.counts[2] / 2000)
    assert report.as_dict()["counted_by"] == "orbit index"


def test_count_small_theta_exact_terminates(ctx8) -> None:
    x = convergents(ctx8, [Digit(1, 2), Digit(-1, 3)])[-1].fraction
    report = count_small_theta(ctx8, x, 100, GRID)
    assert report.terminated
    assert report.N == 5
    assert report.rosen_steps == 2


def test_float_and_high_precision_counts_agree_on_short_orbits(ctx8) -> None:
    fast = count_small_theta(ctx8, 0.3, 20, GRID)
    slow = count_small_theta(ctx8, 0.3, 20, GRID, precision_bits=256)
    assert np.array_equal(fast.counts, slow.counts)
    assert fast.rosen_steps == slow.rosen_steps


def test_count_small_theta_arguments(ctx8) -> None:
    with pytest.raises(OutOfIntervalError):
        count_small_theta(ctx8, 1.5, 10, GRID)
    with pytest.raises(ValueError):
        count_small_theta(ctx8, 0.3, 0, GRID)
    with pytest.raises(ValueError):
        count_small_theta(ctx8, 0.3, 10, [0.5, -1.0])


def test_mediant_u_times_see_the_rosen_thetas(ctx8) -> None:
    lam = float(ctx8.lambda_float)
    thetas, is_u, _ = _mediant_thetas(lam, 0.3141, 5000)
    rosen, _, _ = _rosen_orbit(lam, 0.3141, 6)
    assert np.allclose(thetas[is_u][:6], rosen, rtol=1e-7)


def test_rosen_counting(ctx8) -> None:
    report = rosen_counting(ctx8, 0.3, 1000, GRID)
    assert report.rosen_steps == report.N == 1000
    assert np.array_equal(report.counts, report.rosen_counts)
    assert np.allclose(report.per_rosen_step, report.normalized)
    with pytest.raises(OutOfIntervalError):
        rosen_counting(ctx8, 0.95, 10, GRID)


def test_random_counting_is_reproducible(ctx8) -> None:
    first = random_counting(ctx8, [1, 2, 3], 500, GRID)
    second = random_counting(ctx8, [1, 2, 3], 500, GRID)
    for a, b in zip(first, second):
        assert np.array_equal(a.counts, b.counts)
    merged = merge_counts(first)
    assert merged.N == 1500
    assert merged.orbits == 3
    assert np.array_equal(merged.counts, sum(r.counts for r in first))


def test_random_counting_pool_matches_serial(ctx8) -> None:
    serial = random_counting(ctx8, [5, 6], 300, GRID, workers=1)
    pooled = random_counting(ctx8, [5, 6], 300, GRID, workers=2)
    for a, b in zip(serial, pooled):
        assert np.array_equal(a.counts, b.counts)


def test_merge_rejects_mismatched_grids(ctx8) -> None:
    a = count_small_theta(ctx8, 0.3, 10, GRID)
    b = count_small_theta(ctx8, 0.3, 10, GRID[:-1])
    with pytest.raises(ValueError):
        a.merge(b)
    with pytest.raises(ValueError):
        merge_counts([])


# ---------------------------------------------------------------------------
# Breakpoint
# ---------------------------------------------------------------------------

def test_breakpoint_arguments(ctx8) -> None:
    grid = np.linspace(0.05, 1.2, 24)
    with pytest.raises(ValueError):
        breakpoint_estimate(ctx8, [1, 2], 200_000, grid)
    with pytest.raises(ValueError):
        breakpoint_estimate(ctx8, [1, 2, 3], 1000, grid)


def test_breakpoint_reports_missing_linear_region(ctx8) -> None:
    grid = [1e-7, 2e-7, 3e-7, 4e-7]
    with pytest.raises(InsufficientLinearRegionError) as info:
        breakpoint_estimate(ctx8, [1, 2, 3], 2000, grid, min_iter=1000)
    assert info.value.curve["t"] == grid


@pytest.mark.slow
@pytest.mark.parametrize("k", [5, 8])
def test_breakpoint_near_lenstra_constant(contexts, k: int) -> None:
    ctx = contexts(k)
    estimate = breakpoint_estimate(ctx, [1, 2, 3, 4, 5], 1_000_000, np.linspace(0.01, 1.2, 120))
    assert estimate.relative_error < 0.03
    assert estimate.plateau_value == pytest.approx(estimate.expected_slope, rel=0.05)



def test_breakpoint_on_reduced_run(ctx8) -> None:
    grid = np.linspace(0.05, 1.2, 47)
    estimate = breakpoint_estimate(ctx8, [1, 2, 3], 200_000, grid, min_iter=200_000)
    assert estimate.relative_error < 0.1
    assert estimate.corner_L == pytest.approx(estimate.target, rel=0.1)
    assert estimate.plateau_value == pytest.approx(estimate.expected_slope, rel=0.05)

# ---------------------------------------------------------------------------
# Entropy and Borel frequency
# ---------------------------------------------------------------------------

def test_lyapunov_entropy_short_run(ctx8) -> None:
    estimate = lyapunov_entropy(ctx8, 50_000, seed=1)
    assert estimate.relative_error < 0.05
    assert estimate.stderr > 0
    assert estimate.as_dict()["k"] == 8
    with pytest.raises(ValueError):
        lyapunov_entropy(ctx8, 10, seed=1)


def test_lyapunov_entropy_short_run_odd_index(ctx5) -> None:
    estimate = lyapunov_entropy(ctx5, 100_000, seed=3)
    assert estimate.relative_error < 0.05
    assert estimate.h_hat == pytest.approx(estimate.target, rel=0.05)


@pytest.mark.slow
@pytest.mark.parametrize("k", [5, 8])
def test_lyapunov_entropy_desk_scale(contexts, k: int) -> None:
    assert lyapunov_entropy(contexts(k), 1_000_000, seed=2).relative_error < 0.01


def test_borel_frequency(ctx8) -> None:
    result = borel_frequency(ctx8, [1, 2], 20_000)
    assert result.threshold == pytest.approx(0.5)
    assert len(result.per_seed) == 2
    assert 0.01 < result.frequency < 1
    with pytest.raises(ValueError):
        borel_frequency(ctx8, [], 100)


@pytest.mark.parametrize("k", [8, 9])
def test_witness_hits_stop(contexts, k: int) -> None:
    hits = witness_theta_hits(contexts(k), 5000)
    assert hits.tail_hits == 0
    assert hits.last_hit is None or hits.last_hit < 500


# ---------------------------------------------------------------------------
# G_k-rationals and Legendre audit
# ---------------------------------------------------------------------------

def test_enumerate_short_words(ctx8) -> None:
    ring = ctx8.ring
    assert enumerate_gk_rationals(ctx8, 1) == [(ring.zero, ring.one)]
    assert enumerate_gk_rationals(ctx8, 2) == [(ring.zero, ring.one)]
    assert enumerate_gk_rationals(ctx8, 3) == [(ring.from_int(-1), ring.lam), (ring.zero, ring.one)]
    assert enumerate_gk_rationals(ctx8, 3, q_cap=1.5) == [(ring.zero, ring.one)]
    with pytest.raises(ValueError):
        enumerate_gk_rationals(ctx8, 0)


def test_enumerated_rationals_have_finite_expansions(ctx8) -> None:
    from rosen_mediant.rosen_maps import expand

    rationals = enumerate_gk_rationals(ctx8, 7)
    assert len(rationals) > 3
    values = [ProjectivePoint(a, c).to_mpf(64) for a, c in rationals]
    assert values == sorted(values)
    for a, c in rationals:
        assert expand(ctx8, ProjectivePoint(a, c), 50).terminated


@pytest.mark.parametrize("k", [5, 8])
def test_legendre_audit_below_threshold(contexts, k: int) -> None:
    ctx = contexts(k)
    rationals = enumerate_gk_rationals(ctx, 6)
    threshold = float(closed_form_constants(ctx).mediant_lenstra) - 0.01
    rng = orbit_rng(17, 0)
    half = float(ctx.lambda_float) / 2
    for value in rng.uniform(-half, half, 5):
        with mp.workprec(ctx.precision_bits):
            x = mp.mpf(value)
        audit = legendre_audit(ctx, x, threshold, 40, rationals)
        assert audit.passed, audit.violations


def test_legendre_audit_terminal_point(ctx8) -> None:
    ring = ctx8.ring
    rationals = enumerate_gk_rationals(ctx8, 4)
    audit = legendre_audit(ctx8, ProjectivePoint.of(ring, 0), 0.5, 10, rationals)
    assert audit.terminal
    assert audit.passed
    with pytest.raises(ValueError):
        legendre_audit(ctx8, 0.1, 0, 10, rationals)


@pytest.mark.slow
@pytest.mark.parametrize("k", [5, 8])
def test_counterexample_above_lenstra_constant(contexts, k: int) -> None:
    ctx = contexts(k)
    rationals = enumerate_gk_rationals(ctx, 8)
    threshold = float(closed_form_constants(ctx).mediant_lenstra) + 0.05
    assert find_legendre_counterexample(ctx, threshold, rationals, 2000, seed=1) is not None


def test_counterexample_above_lenstra_constant_short_words(ctx8) -> None:
    rationals = enumerate_gk_rationals(ctx8, 6)
    threshold = float(closed_form_constants(ctx8).mediant_lenstra) + 0.1
    found = find_legendre_counterexample(ctx8, threshold, rationals, 600, seed=1)
    assert found is not None
    assert found["attempts"] <= 600
