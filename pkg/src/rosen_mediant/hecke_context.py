"""Per-index constants of the Hecke group G_k.

A :class:`HeckeContext` is built once per index k and then shared read-only
by every other module: lambda_k, the parity data, R, the Hurwitz constant and
the boundary tables phi_j, L_j of the planar domains.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

from mpmath import mp

from .algebraic_ring import LambdaRing, ProjectivePoint, ZLambda, zl_sign
from .errors import ArithmeticInvariantError, HeckeIndexError, OutOfIntervalError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
DEFAULT_PRECISION_BITS = 256


@dataclass(frozen=True)
class Parity:
    """k = 2*ell (even) or k = 2*ell + 3 (odd)."""

    kind: str
    ell: int

    @property
    def is_even(self) -> bool:
        return self.kind == "even"

    def to_mapping(self) -> Dict[str, Any]:
        return {"kind": self.kind, "ell": self.ell}


@dataclass(frozen=True, eq=False)
class HeckeContext:
    """Every constant of a fixed index k."""

    k: int
    precision_bits: int
    ring: LambdaRing
    lambda_float: Any
    lambda_exact: ZLambda
    min_poly: Tuple[int, ...]
    parity: Parity
    R: Any
    hurwitz_C: Any
    phi_table: Tuple[Any, ...]
    phi_exact: Tuple[ProjectivePoint, ...]
    L_table: Tuple[Any, ...]
    error_bound: Any

    # Derived values ---------------------------------------------------------
    @property
    def is_even(self) -> bool:
        return self.parity.is_even

    @property
    def ell(self) -> int:
        return self.parity.ell

    @property
    def half_lambda(self) -> Any:
        with mp.workprec(self.precision_bits):
            return self.lambda_float / 2

    @property
    def two_over_lambda(self) -> Any:
        with mp.workprec(self.precision_bits):
            return 2 / self.lambda_float

    @property
    def mediant_cut(self) -> Any:
        """2/(3 lambda), the cut between the U and V branches of S."""

        with mp.workprec(self.precision_bits):
            return 2 / (3 * self.lambda_float)

    def phi(self, j: int) -> Any:
        return self.phi_table[j]

    def L(self, j: int) -> Any:
        """L_j with the 1-based indexing of the boundary recurrences."""

        if j < 1 or j > len(self.L_table):
            raise IndexError(f"L_{j} is not defined for k={self.k}")
        return self.L_table[j - 1]

    def lambda_at(self, bits: int) -> Any:
        return self.ring.lambda_at(bits)

    def explain(self, digits: Optional[int] = None) -> Dict[str, Any]:
        full = digits or 30
        return {
            "schema_version": SCHEMA_VERSION,
            "k": self.k,
            "precision_bits": self.precision_bits,
            "lambda": format_real(self.lambda_float, int(self.precision_bits * 0.30103)),
            "parity": self.parity.to_mapping(),
            "R": format_real(self.R, full),
            "hurwitz_C": format_real(self.hurwitz_C, full),
            "phi": [format_real(v, full) for v in self.phi_table],
            "L": [format_real(v, full) for v in self.L_table],
            "min_poly": list(self.min_poly),
            "error_bound": format_real(self.error_bound, 5),
        }


@dataclass(frozen=True)
class ConstantsReport:
    """Closed-form Lenstra and Hurwitz constants of a context."""

    k: int
    rosen_lenstra: Any
    mediant_lenstra: Any
    hurwitz_C: Any
    k4_candidates: Optional[Dict[str, Any]] = None

    def as_dict(self, digits: int = 30) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "k": self.k,
            "rosen_lenstra": format_real(self.rosen_lenstra, digits),
            "mediant_lenstra": format_real(self.mediant_lenstra, digits),
            "hurwitz_C": format_real(self.hurwitz_C, digits),
        }
        if self.k4_candidates:
            data["k4_candidates"] = {name: format_real(v, digits) for name, v in self.k4_candidates.items()}
        return data


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

def new_context(k: int, precision_bits: int = DEFAULT_PRECISION_BITS) -> HeckeContext:
    if isinstance(k, bool) or not isinstance(k, int):
        raise HeckeIndexError(f"Hecke index must be an integer, got {k!r}")
    if k < 4:
        raise HeckeIndexError(f"Hecke index k={k} is unsupported; k >= 4 is required")
    if precision_bits < 64:
        raise ValueError("precision_bits must be at least 64")

    ring = LambdaRing.for_index(k)
    parity = Parity("even", k // 2) if k % 2 == 0 else Parity("odd", (k - 3) // 2)

    with mp.workprec(precision_bits):
        lam = 2 * mp.cos(mp.pi / k)
        error_bound = mp.ldexp(1, 16 - precision_bits)
        _check_min_poly(ring, lam, precision_bits)

        if parity.is_even:
            R = mp.mpf(1)
            hurwitz = mp.mpf(1) / 2
        else:
            R = ((lam - 2) + mp.sqrt((2 - lam) ** 2 + 4)) / 2
            hurwitz = 1 / (2 * mp.sqrt((1 - lam / 2) ** 2 + 1))
            if not (lam / 2 < R < 1):
                raise ArithmeticInvariantError(f"R={R} outside (lambda/2, 1) for k={k}")

        phi_exact = _phi_orbit(ring, parity)
        phi_table = tuple(p.to_mpf(precision_bits) for p in phi_exact)
        L_table = _L_table(lam, R, parity, error_bound)

    logger.debug("[rosen-mediant] built context k=%d at %d bits", k, precision_bits)
    return HeckeContext(
        k=k,
        precision_bits=precision_bits,
        ring=ring,
        lambda_float=lam,
        lambda_exact=ring.lam,
        min_poly=ring.min_poly,
        parity=parity,
        R=R,
        hurwitz_C=hurwitz,
        phi_table=phi_table,
        phi_exact=phi_exact,
        L_table=L_table,
        error_bound=error_bound,
    )


def closed_form_constants(ctx: HeckeContext) -> ConstantsReport:
    with mp.workprec(ctx.precision_bits):
        lam, R = ctx.lambda_float, ctx.R
        candidates = None
        if ctx.is_even:
            rosen = lam / (lam + 2)
        else:
            rosen = R / (R + 1)
        if ctx.k == 4:
            mediant = mp.sqrt(2) / 2
            candidates = {"sqrt2_over_2": mediant, "sqrt2_minus_1": mp.sqrt(2) - 1}
        else:
            mediant = lam - R
    if not mediant > ctx.hurwitz_C:
        raise ArithmeticInvariantError(f"mediant Lenstra constant does not exceed C({ctx.k})")
    return ConstantsReport(ctx.k, rosen, mediant, ctx.hurwitz_C, candidates)


# ---------------------------------------------------------------------------
# Exact Rosen step (needed for the phi tables)
# ---------------------------------------------------------------------------

def exact_rosen_step(ring: LambdaRing, x: ProjectivePoint) -> Tuple[ProjectivePoint, int, int]:
    """T(x) for x = a/b in Q(lambda); returns (T(x), eps, r), with r = 0 at x = 0."""

    a, b = x.num, x.den
    lam = ring.lam
    if x.is_infinite() or zl_sign(a * 2 + lam * b) < 0 or zl_sign(lam * b - a * 2) <= 0:
        raise OutOfIntervalError("x must lie in [-lambda/2, lambda/2)")
    eps = zl_sign(a)
    if eps == 0:
        return x, 0, 0

    abs_a = a if eps > 0 else -a
    with mp.workprec(128):
        estimate = b.to_mpf(128) / (ring.lambda_at(128) * abs_a.to_mpf(128)) + mp.mpf(1) / 2
    r = max(1, int(mp.floor(estimate)))
    # settle floor(b/(lambda|a|) + 1/2) exactly
    while zl_sign(b * 2 - lam * abs_a * (2 * r - 1)) < 0:
        r -= 1
    while zl_sign(lam * abs_a * (2 * r + 1) - b * 2) <= 0:
        r += 1
    image = ProjectivePoint(b - lam * abs_a * r, abs_a)
    return image, eps, r


def _phi_orbit(ring: LambdaRing, parity: Parity) -> Tuple[ProjectivePoint, ...]:
    lam = ring.lam
    point = ProjectivePoint(-lam, ring.from_int(2))
    count = parity.ell if parity.is_even else 2 * parity.ell + 2
    orbit = [point]
    for _ in range(count - 1):
        point, _, _ = exact_rosen_step(ring, point)
        orbit.append(point)

    if not orbit[-1].is_zero():
        raise ArithmeticInvariantError("orbit of -lambda/2 does not end at 0")
    if parity.is_even:
        order = list(range(len(orbit)))
    else:
        _check_odd_interleaving(ring, orbit, parity.ell)
        ell = parity.ell
        order = []
        for j in range(ell):
            order.extend([j, ell + 1 + j])
        order.extend([ell, 2 * ell + 1])
    for left, right in zip(order, order[1:]):
        if orbit[left].compare(orbit[right]) >= 0:
            raise ArithmeticInvariantError(f"phi_{left} < phi_{right} fails")
    return tuple(orbit)


def _check_odd_interleaving(ring: LambdaRing, orbit: List[ProjectivePoint], ell: int) -> None:
    lam = ring.lam
    one_minus_lam = ProjectivePoint(1 - lam, ring.one)
    if orbit[ell + 1] != one_minus_lam:
        raise ArithmeticInvariantError("phi_{ell+1} != 1 - lambda")
    cut3 = ProjectivePoint(ring.from_int(-2), lam * 3)
    cut5 = ProjectivePoint(ring.from_int(-2), lam * 5)
    middle = orbit[ell]
    if not (middle.compare(cut3) > 0 and middle.compare(cut5) < 0):
        raise ArithmeticInvariantError("phi_ell outside (-2/(3 lambda), -2/(5 lambda))")
    for j, point in enumerate(orbit[:-1]):
        if j != ell and point.compare(cut3) >= 0:
            raise ArithmeticInvariantError(f"phi_{j} does not lie left of -2/(3 lambda)")


def _L_table(lam: Any, R: Any, parity: Parity, tol: Any) -> Tuple[Any, ...]:
    ell = parity.ell
    if parity.is_even:
        values = [1 / (lam + 1)]
        for _ in range(2, ell):
            values.append(1 / (lam - values[-1]))
        if abs(values[-1] - (lam - 1)) > tol:
            raise ArithmeticInvariantError("L_{ell-1} != lambda - 1")
        return tuple(values)

    closed = {2 * ell: lam - 1 / R, 2 * ell + 1: lam - R}
    table: Dict[int, Any] = {
        1: 1 / (2 * lam - closed[2 * ell]),
        2: 1 / (2 * lam - closed[2 * ell + 1]),
    }
    for j in range(3, 2 * ell + 3):
        table[j] = 1 / (lam - table[j - 2])
    for j, expected in closed.items():
        if abs(table[j] - expected) > tol:
            raise ArithmeticInvariantError(f"L_{j} recurrence disagrees with its closed form")
    return tuple(table[j] for j in range(1, 2 * ell + 3))


def _check_min_poly(ring: LambdaRing, lam: Any, bits: int) -> None:
    value = mp.mpf(0)
    for c in reversed(ring.min_poly):
        value = value * lam + c
    if abs(value) >= mp.ldexp(1, -(bits // 2)):
        raise ArithmeticInvariantError(f"minimal polynomial residual {value} too large")


# ---------------------------------------------------------------------------
# Formatting
# ---------------------------------------------------------------------------

def format_real(value: Any, digits: int = 30) -> str:
    """Decimal string with ``digits`` significant digits; infinities as '-inf'/'inf'."""

    if value is None:
        return "null"
    if mp.isinf(value):
        return "-inf" if value < 0 else "inf"
    with mp.workprec(max(64, int(digits * 3.33) + 16)):
        return mp.nstr(mp.mpf(value), digits)
