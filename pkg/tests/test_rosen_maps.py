from __future__ import annotations

import logging

import pytest
from mpmath import mp

from rosen_mediant.algebraic_ring import zl_eval
from rosen_mediant.errors import OutOfIntervalError, TerminalOrbitError
from rosen_mediant.rosen_maps import (
    Digit,
    MediantSymbol,
    OrbitKernel,
    convergents,
    expand,
    induced_length,
    mediant_convergents,
    mediant_step,
    orbit_fractions,
    rosen_digit_matrix,
    rosen_step,
    rosen_theta_pair,
    symbol_expand,
    symbol_matrix,
    theta_direct,
    theta_orbit,
)

U_MINUS, U_PLUS = MediantSymbol.UMINUS, MediantSymbol.UPLUS
V_MINUS, V_PLUS = MediantSymbol.VMINUS, MediantSymbol.VPLUS


def _finite_point(ctx):
    """x = 1/(2 lambda - 1/(3 lambda)), whose Rosen digits are (+1:2)(-1:3)."""

    return convergents(ctx, [Digit(1, 2), Digit(-1, 3)])[-1].fraction


def test_digit_validation() -> None:
    with pytest.raises(ValueError):
        Digit(0, 1)
    with pytest.raises(ValueError):
        Digit(1, 0)
    assert str(Digit(-1, 3)) == "(-1:3)"


def test_rosen_step_float(ctx4) -> None:
    step = rosen_step(ctx4, 0.3)
    assert step.digit == Digit(1, 2)
    with mp.workprec(256):
        assert abs(step.value - (1 / mp.mpf(0.3) - 2 * mp.sqrt(2))) < mp.mpf(2) ** -200
    assert not step.near_boundary


def test_rosen_step_zero_is_terminal(ctx8) -> None:
    step = rosen_step(ctx8, 0)
    assert step.terminal
    assert step.value == 0


@pytest.mark.parametrize("x", [0.93, -0.95, 1.0])
def test_rosen_step_outside_interval(ctx8, x: float) -> None:
    with pytest.raises(OutOfIntervalError):
        rosen_step(ctx8, x)


@pytest.mark.parametrize(
    "x, symbol, image",
    [
        (-0.5, U_MINUS, lambda lam: 2 - lam),
        (-0.1, V_MINUS, lambda lam: 0.1 / (1 - 0.1 * lam)),
        (0.2, V_PLUS, lambda lam: 0.2 / (1 - 0.2 * lam)),
        (0.5, U_PLUS, lambda lam: 2 - lam),
    ],
)
def test_mediant_branches(ctx8, x, symbol, image) -> None:
    kernel = OrbitKernel(ctx8, 53)
    assert kernel.is_float
    step = mediant_step(ctx8, x, kernel)
    assert step.symbol is symbol
    assert step.value == pytest.approx(image(kernel.lam), rel=1e-12)


def test_mediant_zero_is_identity(ctx8) -> None:
    step = mediant_step(ctx8, 0.0, OrbitKernel(ctx8, 53))
    assert step.symbol is MediantSymbol.IDENT
    assert step.value == 0


def test_mediant_interval_is_right_open(ctx8) -> None:
    kernel = OrbitKernel(ctx8, 53)
    with pytest.raises(OutOfIntervalError):
        mediant_step(ctx8, kernel.two_over_lam, kernel)
    assert mediant_step(ctx8, -kernel.half_lam, kernel).symbol is U_MINUS


def test_exact_expansion_terminates(ctx8) -> None:
    x = _finite_point(ctx8)
    digits = expand(ctx8, x, 10)
    assert digits.digits == (Digit(1, 2), Digit(-1, 3))
    assert digits.terminated
    assert str(digits) == "(+1:2)(-1:3)"

    symbols = symbol_expand(ctx8, x, 10)
    assert symbols.symbols == (V_PLUS, U_PLUS, V_MINUS, V_PLUS, U_PLUS)
    assert symbols.terminated
    assert symbols.u_positions == (2, 5)


def test_float_and_exact_paths_agree(ctx8) -> None:
    x = _finite_point(ctx8)
    with mp.workprec(256):
        value = x.to_mpf(256)
    assert expand(ctx8, value, 2).digits == (Digit(1, 2), Digit(-1, 3))
    assert symbol_expand(ctx8, value, 5).symbols == (V_PLUS, U_PLUS, V_MINUS, V_PLUS, U_PLUS)


def test_symbol_blocks_multiply_to_digit_matrices(ctx9) -> None:
    ring = ctx9.ring
    x = mp.mpf("0.0713")
    digits = expand(ctx9, x, 6)
    symbols = symbol_expand(ctx9, x, sum(d.r for d in digits))
    position = 0
    for digit in digits:
        block = ring.identity()
        for _ in range(digit.r):
            block = block @ symbol_matrix(ring, symbols[position])
            position += 1
        assert symbols[position - 1].is_u
        assert block == rosen_digit_matrix(ring, digit)


@pytest.mark.parametrize("x", ["0.1", "0.37", "-0.23", "0.71", "-0.9", "0.05"])
def test_induced_length_matches_rosen_digit(ctx8, x: str) -> None:
    result = induced_length(ctx8, mp.mpf(x))
    assert result.verified
    assert result.matches_digit


def test_induced_length_exact(ctx8) -> None:
    result = induced_length(ctx8, _finite_point(ctx8))
    assert result.length == 1
    assert result.verified
    assert result.matches_digit


def test_induced_length_at_zero(ctx8) -> None:
    with pytest.raises(TerminalOrbitError):
        induced_length(ctx8, 0)


def test_convergents_recurrence(ctx8) -> None:
    lam = ctx8.ring.lam
    states = convergents(ctx8, [Digit(1, 2), Digit(-1, 3)])
    assert [s.n for s in states] == [0, 1, 2]
    assert states[0].p_cur == 0 and states[0].q_cur == 1
    assert states[1].p_cur == 1 and states[1].q_cur == lam * 2
    assert states[2].p_cur == lam * 3
    assert states[2].q_cur == lam * lam * 6 - 1
    for state in states[1:]:
        det = state.p_prev * state.q_cur - state.q_prev * state.p_cur
        assert det == 1 or det == -1
    with mp.workprec(256):
        lam_f = ctx8.lambda_float
        assert abs(states[2].value - 1 / (2 * lam_f - 1 / (3 * lam_f))) < states[2].error_bound + mp.mpf(2) ** -200
    assert states[2].to_mapping()["n"] == 2


def test_mediant_convergents_interleave(ctx8) -> None:
    x = _finite_point(ctx8)
    entries = mediant_convergents(ctx8, x, 10)
    assert [e.kind for e in entries] == ["mediant", "principal", "mediant", "mediant", "principal"]
    assert [(e.level, e.offset) for e in entries] == [(0, 1), (1, 0), (1, 1), (1, 2), (2, 0)]
    principal = [e for e in entries if e.kind == "principal"]
    states = convergents(ctx8, [Digit(1, 2), Digit(-1, 3)])
    assert principal[0].fraction == states[1].fraction
    assert principal[1].fraction == x
    assert all(e.v.sign() > 0 for e in entries)


def test_mediant_convergents_depth(ctx8) -> None:
    with pytest.raises(ValueError):
        mediant_convergents(ctx8, 0.3, 0)


def test_theta_orbit_matches_direct_formula(ctx8) -> None:
    x = mp.mpf(1) / 7
    series = theta_orbit(ctx8, x, 12)
    fractions = orbit_fractions(ctx8, x, 12)
    assert len(series) == len(fractions) == 12
    with mp.workprec(256):
        for value, (symbol, a, c) in zip(series.values, fractions):
            direct = theta_direct(ctx8, x, a, c)
            assert abs(value - direct) < mp.mpf(10) ** -40 * max(1, direct)
    assert list(series.symbols) == [s for s, _, _ in fractions]


def test_theta_orbit_exact_point(ctx8) -> None:
    x = _finite_point(ctx8)
    series = theta_orbit(ctx8, x, 10)
    assert series.terminated
    assert len(series) == 5
    assert series.to_mapping(10)["symbols"] == ["V+", "U+", "V-", "V+", "U+"]


def test_theta_argument_checks(ctx8) -> None:
    ring = ctx8.ring
    with pytest.raises(ValueError):
        theta_orbit(ctx8, 0.3, 0)
    with pytest.raises(ValueError):
        theta_direct(ctx8, 0.3, ring.one, -ring.lam)


def test_rosen_theta_pair() -> None:
    before, after = rosen_theta_pair(0.5, 0.25)
    assert before == pytest.approx(0.25 / 1.125)
    assert after == pytest.approx(0.5 / 1.125)


def test_ambiguous_branch_escalates_then_warns(ctx8, caplog) -> None:
    with mp.workprec(1024):
        cut = 2 / (3 * 2 * mp.cos(mp.pi / 8))
    with caplog.at_level(logging.WARNING, logger="rosen_mediant.rosen_maps"):
        symbols = symbol_expand(ctx8, cut, 3, margin_factor=64, max_bits=512)
    assert symbols.ambiguous
    assert symbols.precision_bits == 512
    assert len(symbols) == 0
    assert "still ambiguous" in caplog.text


def test_denominator_ratio_is_the_reversed_fraction(ctx9) -> None:
    digits = expand(ctx9, mp.mpf("0.2718"), 8).digits
    states = convergents(ctx9, digits)
    with mp.workprec(256):
        lam = ctx9.lambda_float
        ratio = mp.zero
        for digit, state in zip(digits, states[1:]):
            # q_(n-1)/q_n = 1/(r_n lambda + eps_n q_(n-2)/q_(n-1))
            ratio = 1 / (digit.r * lam + digit.eps * ratio)
            exact = zl_eval(state.q_prev, 256).midpoint / zl_eval(state.q_cur, 256).midpoint
            assert abs(ratio - exact) < mp.mpf(2) ** -200
