"""The verification suite behind ``rosen-mediant verify``.

Each check returns a :class:`CheckResult`; a failing check never stops the
others, and the report's failure list is empty exactly when every check
passed.
"""

from __future__ import annotations

import logging
from copy import deepcopy
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence

from mpmath import mp

from .algebraic_ring import MobiusZL
from .config import DEFAULT_CONFIG, deep_merge
from .errors import RosenMediantError
from .hecke_context import SCHEMA_VERSION, HeckeContext, closed_form_constants, format_real
from .planar_extension import (
    build_domains,
    check_bijectivity,
    check_conjugacy,
    check_dual_equation,
    check_induced_composition,
    check_invariance,
    check_theta_formulas,
    geometric_lenstra,
    linearity_threshold,
    random_rectangles,
    witness_orbit,
)
from .rosen_maps import (
    expand,
    induced_length,
    orbit_fractions,
    rosen_digit_matrix,
    symbol_expand,
    symbol_matrix,
    theta_direct,
    theta_orbit,
)

logger = logging.getLogger(__name__)

CONSTANT_TOLERANCE = mp.mpf("1e-10")


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    details: Dict[str, Any] = field(default_factory=dict)

    def as_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "passed": self.passed, "details": self.details}


@dataclass
class VerificationReport:
    k: int
    checks: List[CheckResult] = field(default_factory=list)
    schema_version: int = SCHEMA_VERSION

    @property
    def failures(self) -> List[str]:
        return [c.name for c in self.checks if not c.passed]

    @property
    def passed(self) -> bool:
        return not self.failures

    def as_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "k": self.k,
            "passed": self.passed,
            "failures": self.failures,
            "checks": [c.as_dict() for c in self.checks],
        }


# ---------------------------------------------------------------------------
# Individual checks
# ---------------------------------------------------------------------------

def _sample_points(ctx: HeckeContext, n: int, seed: int, orbit_id: int) -> List[Any]:
    from .ergodic_stats import orbit_rng

    rng = orbit_rng(seed, orbit_id)
    half = float(ctx.lambda_float) / 2
    with mp.workprec(ctx.precision_bits):
        return [mp.mpf(v) for v in rng.uniform(-half, half, n)]


def _check_factorization(ctx: HeckeContext, settings: Mapping[str, Any], seed: int) -> CheckResult:
    ring = ctx.ring
    gens = ring.generators
    u_plus_inv = gens["U+"].inverse()
    v_plus, v_minus_inv = gens["V+"], gens["V-"].inverse()
    identities = 0
    for t in range(2, 7):
        left = MobiusZL(ring.lam * t, ring.one, -ring.one, ring.zero)
        if left != u_plus_inv @ v_plus.power(-(t - 2)) @ v_minus_inv:
            return CheckResult("factorization", False, {"identity": "first", "t": t})
        right = MobiusZL(-ring.lam * t, ring.one, ring.one, ring.zero)
        if right != u_plus_inv @ v_plus.power(-(t - 1)):
            return CheckResult("factorization", False, {"identity": "second", "t": t})
        identities += 2

    mismatches: List[str] = []
    points = _sample_points(ctx, settings["induced_points"], seed, 10)
    for x in points:
        digits = expand(ctx, x, settings.get("depth", 20))
        if not digits.digits:
            continue
        first = digits.digits[0]
        symbols = symbol_expand(ctx, x, first.r)
        product = ring.identity()
        for symbol in symbols:
            product = product @ symbol_matrix(ring, symbol)
        if len(symbols) == first.r and product != rosen_digit_matrix(ring, first):
            mismatches.append(format_real(x, 20))
    return CheckResult(
        "factorization",
        not mismatches,
        {"identities": identities, "points": len(points), "mismatches": mismatches[:20]},
    )


def _check_induced_relation(ctx: HeckeContext, settings: Mapping[str, Any], seed: int) -> CheckResult:
    failures: List[str] = []
    points = _sample_points(ctx, settings["induced_points"], seed, 11)
    for x in points:
        if x == 0:
            continue
        result = induced_length(ctx, x)
        if not (result.verified and result.matches_digit):
            failures.append(format_real(x, 20))
    return CheckResult("induced_relation", not failures, {"points": len(points), "failures": failures[:20]})


def _check_theta_cross_path(ctx: HeckeContext, settings: Mapping[str, Any], seed: int) -> CheckResult:
    depth = settings.get("depth", 20)
    worst = mp.zero
    points = _sample_points(ctx, settings["theta_points"], seed, 12)
    for x in points:
        series = theta_orbit(ctx, x, depth)
        for value, (_, a, c) in zip(series.values, orbit_fractions(ctx, x, len(series))):
            with mp.workprec(ctx.precision_bits):
                worst = max(worst, abs(value - theta_direct(ctx, x, a, c)))
    passed = worst < CONSTANT_TOLERANCE
    return CheckResult("theta_cross_path", passed, {"points": len(points), "max_deviation": format_real(worst, 6)})


def _check_constants(ctx: HeckeContext, settings: Mapping[str, Any], seed: int) -> CheckResult:
    domains = build_domains(ctx)
    constants = closed_form_constants(ctx)
    rosen = geometric_lenstra(ctx, "rosen", domains)
    mediant = geometric_lenstra(ctx, "mediant", domains)
    with mp.workprec(ctx.precision_bits):
        rosen_linear = 1 / linearity_threshold(ctx, domains[0])
        mediant_linear = 1 / linearity_threshold(ctx, domains[1])
        agree_rosen = abs(rosen_linear - rosen.constant) < CONSTANT_TOLERANCE
        agree_mediant = abs(mediant_linear - mediant.constant) < CONSTANT_TOLERANCE
        above_hurwitz = mediant.constant > ctx.hurwitz_C
    details: Dict[str, Any] = {
        "closed_form": constants.as_dict(),
        "rosen": rosen.as_dict(),
        "mediant": mediant.as_dict(),
        "rosen_from_threshold": format_real(rosen_linear),
        "mediant_from_threshold": format_real(mediant_linear),
    }
    passed = bool(agree_rosen and agree_mediant and above_hurwitz and rosen.agrees)
    if ctx.k != 4:
        passed = passed and mediant.agrees
    else:
        details["k4_adjudication"] = "geometric corner maximum vs clipped-measure threshold"
    return CheckResult("constants", passed, details)


def _check_witness(ctx: HeckeContext, settings: Mapping[str, Any], seed: int) -> CheckResult:
    orbit = witness_orbit(ctx, settings.get("witness_precision_bits", 512))
    tol = mp.mpf("1e-12")
    with mp.workprec(ctx.precision_bits):
        smallest = min(orbit.theta_values)
        below = [i for i, v in enumerate(orbit.theta_values) if v < orbit.hurwitz_C - tol]
        passed = not below and abs(smallest - orbit.min_theta) < tol
        if ctx.is_even:
            # the bound 1/2 is attained on the orbit
            passed = passed and abs(smallest - mp.mpf(1) / 2) < tol and bool(orbit.equality_indices)
    details = orbit.to_mapping(20)
    details["below_C"] = below[:20]
    return CheckResult("witness", bool(passed), details)


def _audit(name: str, runner: Callable[..., Any]) -> Callable[[HeckeContext, Mapping[str, Any], int], CheckResult]:
    def check(ctx: HeckeContext, settings: Mapping[str, Any], seed: int) -> CheckResult:
        report = runner(ctx, settings, seed)
        return CheckResult(name, report.passed, report.as_dict())

    return check


CHECKS: Dict[str, Callable[[HeckeContext, Mapping[str, Any], int], CheckResult]] = {
    "factorization": _check_factorization,
    "induced_relation": _check_induced_relation,
    "bijectivity": _audit(
        "bijectivity",
        lambda ctx, s, seed: check_bijectivity(
            ctx,
            s["samples"],
            seed,
            precision_bits=s["audit_precision_bits"],
            collar_bits=s["boundary_collar_bits"],
            y_max_factor=s["y_max_factor"],
        ),
    ),
    "invariance": _audit(
        "invariance",
        lambda ctx, s, seed: check_invariance(ctx, random_rectangles(ctx, s["rectangles"], seed, s["y_max_factor"])),
    ),
    "dual_equation": _audit("dual_equation", lambda ctx, s, seed: check_dual_equation(ctx, s["dual_points"], seed)),
    "induced_composition": _audit(
        "induced_composition", lambda ctx, s, seed: check_induced_composition(ctx, s["induced_points"], seed)
    ),
    "conjugacy": _audit("conjugacy", lambda ctx, s, seed: check_conjugacy(ctx, s["orbits"], s["orbit_length"], seed)),
    "theta_formulas": _audit("theta_formulas", lambda ctx, s, seed: check_theta_formulas(ctx, s["theta_points"], seed)),
    "theta_cross_path": _check_theta_cross_path,
    "constants": _check_constants,
    "witness": _check_witness,
}


def _settings(config: Optional[Mapping[str, Any]]) -> Dict[str, Any]:
    merged = deepcopy(DEFAULT_CONFIG)
    if config:
        deep_merge(merged, config)
    settings = dict(merged["verify"])
    settings.update(merged["domain"])
    settings["depth"] = merged["orbits"]["depth"]
    return settings


def run_verification(
    ctx: HeckeContext,
    config: Optional[Mapping[str, Any]] = None,
    seed: int = 42,
    only: Optional[Sequence[str]] = None,
) -> VerificationReport:
    """Run every check (or the ones named in ``only``) for the index of ``ctx``."""

    settings = _settings(config)
    names = list(only) if only else list(CHECKS)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise ValueError(f"unknown checks: {', '.join(unknown)}")
    report = VerificationReport(ctx.k)
    for name in names:
        try:
            result = CHECKS[name](ctx, settings, seed)
        except RosenMediantError as exc:
            result = CheckResult(name, False, {"error": type(exc).__name__, "message": str(exc)})
        logger.info("[rosen-mediant] k=%d %s: %s", ctx.k, name, "pass" if result.passed else "FAIL")
        report.checks.append(result)
    return report
