"""Planar natural extensions of the mediant map S and the Rosen map T.

Domains are finite unions of fibers ``[x_lo, x_hi) x [y_lo, y_hi]`` whose
lower edge may be ``-inf``.  The invariant measure is dx dy / (x - y)^2 and
is evaluated in closed form, so every audit here compares exact
expressions rather than quadratures.
"""

from __future__ import annotations

import bisect
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from mpmath import mp

from .algebraic_ring import ProjectivePoint
from .errors import (
    ArithmeticInvariantError,
    CertificationError,
    DiagonalCrossingError,
    DivergentMeasureError,
    OutOfIntervalError,
    TerminalOrbitError,
)
from .hecke_context import HeckeContext, closed_form_constants, exact_rosen_step, format_real
from .rosen_maps import (
    Digit,
    MediantSymbol,
    OrbitKernel,
    convergents,
    exact_mediant_symbol,
    expand,
    inverse_symbol_matrix,
    rosen_digit_matrix,
    rosen_theta_pair,
    symbol_matrix,
    theta_direct,
)

logger = logging.getLogger(__name__)

OMEGA_0 = "Omega0"
OMEGA_STAR = "OmegaStar"

INSIDE = "inside"
BOUNDARY = "boundary"
OUTSIDE = "outside"

DEFAULT_COLLAR_BITS = 40
DEFAULT_Y_MAX_FACTOR = 10
MAX_REPORTED_VIOLATIONS = 20

GENERATORS = (
    MediantSymbol.UMINUS,
    MediantSymbol.VMINUS,
    MediantSymbol.VPLUS,
    MediantSymbol.UPLUS,
)

# Branches of the dual map and the S-branch whose matrix they use.
DUAL_BRANCHES: Dict[str, MediantSymbol] = {
    "i": MediantSymbol.UMINUS,
    "ii": MediantSymbol.VMINUS,
    "iii": MediantSymbol.VPLUS,
    "iv": MediantSymbol.UPLUS,
}


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Fiber:
    """The rectangle [x_lo, x_hi) x [y_lo, y_hi]."""

    x_lo: Any
    x_hi: Any
    y_lo: Any
    y_hi: Any

    @property
    def unbounded(self) -> bool:
        return bool(mp.isinf(self.y_lo))

    def translated(self, shift: Any) -> "Fiber":
        return Fiber(self.x_lo + shift, self.x_hi + shift, self.y_lo + shift, self.y_hi + shift)

    def to_mapping(self, digits: int = 30) -> Dict[str, str]:
        return {
            "x_lo": format_real(self.x_lo, digits),
            "x_hi": format_real(self.x_hi, digits),
            "y_lo": format_real(self.y_lo, digits),
            "y_hi": format_real(self.y_hi, digits),
        }


@dataclass(frozen=True)
class PlanarDomain:
    label: str
    parity: str
    fibers: Tuple[Fiber, ...]
    precision_bits: int

    @property
    def x_min(self) -> Any:
        return self.fibers[0].x_lo

    @property
    def x_max(self) -> Any:
        return self.fibers[-1].x_hi

    def fiber_at(self, x: Any) -> Optional[int]:
        """Index of the fiber whose J-interval contains x."""

        lows = [f.x_lo for f in self.fibers]
        i = bisect.bisect_right(lows, x) - 1
        if i < 0 or x >= self.fibers[i].x_hi:
            return None
        return i

    def to_mapping(self, digits: int = 30) -> Dict[str, Any]:
        return {
            "label": self.label,
            "parity": self.parity,
            "fibers": [f.to_mapping(digits) for f in self.fibers],
        }


@dataclass(frozen=True)
class PlanarPoint:
    """(x, y) with y allowed to be -inf; exact when both coordinates are ProjectivePoints."""

    x: Any
    y: Any

    @property
    def is_exact(self) -> bool:
        return isinstance(self.x, ProjectivePoint) and isinstance(self.y, ProjectivePoint)

    def theta_exact(self) -> ProjectivePoint:
        if not self.is_exact:
            raise TypeError("theta_exact needs exact coordinates")
        if self.y.is_infinite():
            return ProjectivePoint.of(self.x.ring, 0)
        return (self.x - self.y).reciprocal()

    def theta(self, bits: int = 256) -> Any:
        """1/(x - y), zero at y = -inf."""

        if self.is_exact:
            return self.theta_exact().to_mpf(bits)
        with mp.workprec(bits):
            y = _real(self.y, bits)
            if mp.isinf(y):
                return mp.zero
            return 1 / (_real(self.x, bits) - y)

    def to_mapping(self, digits: int = 30) -> Dict[str, str]:
        bits = int(digits * 3.33) + 16
        return {"x": format_real(_real(self.x, bits), digits), "y": format_real(_real(self.y, bits), digits)}


def _real(value: Any, bits: int) -> Any:
    if isinstance(value, ProjectivePoint):
        return mp.ninf if value.is_infinite() else value.to_mpf(bits)
    return value


def _coord(kernel: OrbitKernel, value: Any) -> Any:
    if isinstance(value, ProjectivePoint) and value.is_infinite():
        return kernel.ninf
    return kernel.convert(value)


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

def _left_breakpoints(ctx: HeckeContext) -> List[Any]:
    """phi values in increasing order; consecutive pairs are the J_j left of 0."""

    ell = ctx.ell
    if ctx.is_even:
        order = list(range(ell))
    else:
        order = []
        for j in range(ell):
            order.extend([j, ell + 1 + j])
        order.extend([ell, 2 * ell + 1])
    return [ctx.phi(i) for i in order]


def build_domains(ctx: HeckeContext) -> Tuple[PlanarDomain, PlanarDomain]:
    """(Omega0, OmegaStar) for the index of ``ctx``."""

    with mp.workprec(ctx.precision_bits):
        lam = ctx.lambda_float
        half, two_over = lam / 2, 2 / lam
        zero, ninf = mp.zero, mp.ninf
        breaks = _left_breakpoints(ctx)
        left = [
            Fiber(breaks[j], breaks[j + 1], ninf, -1 / ctx.L(j + 1))
            for j in range(len(breaks) - 1)
        ]
        if ctx.is_even:
            right = [Fiber(zero, half, ninf, zero), Fiber(half, two_over, mp.mpf(-1), zero)]
            floor_top = mp.mpf(-1)
        else:
            R = ctx.R
            right = [
                Fiber(zero, half, ninf, zero),
                Fiber(half, mp.one, -1 / R, zero),
                Fiber(mp.one, two_over, -R, zero),
            ]
            floor_top = -1 / R

        star = PlanarDomain(OMEGA_STAR, ctx.parity.kind, tuple(left + right), ctx.precision_bits)
        base = PlanarDomain(
            OMEGA_0,
            ctx.parity.kind,
            tuple(left + [Fiber(zero, half, ninf, floor_top)]),
            ctx.precision_bits,
        )
        _check_domains(ctx, base, star, floor_top)
    logger.debug("[rosen-mediant] built domains for k=%d (%d fibers)", ctx.k, len(star.fibers))
    return base, star


def _check_domains(ctx: HeckeContext, base: PlanarDomain, star: PlanarDomain, floor_top: Any) -> None:
    tol = ctx.error_bound
    for domain, end in ((base, ctx.half_lambda), (star, ctx.two_over_lambda)):
        if abs(domain.x_min + ctx.half_lambda) > tol or abs(domain.x_max - end) > tol:
            raise ArithmeticInvariantError(f"{domain.label} does not span its interval")
        for left, right in zip(domain.fibers, domain.fibers[1:]):
            if abs(left.x_hi - right.x_lo) > tol or not left.x_lo < left.x_hi:
                raise ArithmeticInvariantError(f"{domain.label} fibers are not contiguous")
    for fiber in base.fibers:
        outer = star.fibers[star.fiber_at(fiber.x_lo)]
        if fiber.y_hi > outer.y_hi + tol or fiber.y_lo < outer.y_lo:
            raise ArithmeticInvariantError("Omega0 is not contained in OmegaStar")
        if fiber.y_hi > floor_top + tol:
            raise ArithmeticInvariantError("Omega0 rises above its floor line")


# ---------------------------------------------------------------------------
# Membership
# ---------------------------------------------------------------------------

class FiberIndex:
    """Fiber bounds of a domain in one numeric type, for fast membership tests."""

    def __init__(self, domain: PlanarDomain, as_float: bool = True) -> None:
        convert = float if as_float else mp.mpf
        with mp.workprec(domain.precision_bits):
            self.bounds = [
                (convert(f.x_lo), convert(f.x_hi), convert(f.y_lo), convert(f.y_hi)) for f in domain.fibers
            ]
        self.lows = [b[0] for b in self.bounds]
        self.label = domain.label

    def classify(self, x: Any, y: Any, collar: Any) -> str:
        i = bisect.bisect_right(self.lows, x) - 1
        verdict = OUTSIDE
        for j in (i - 1, i, i + 1):
            if j < 0 or j >= len(self.bounds):
                continue
            x_lo, x_hi, y_lo, y_hi = self.bounds[j]
            if x < x_lo - collar or x >= x_hi + collar or y < y_lo - collar or y > y_hi + collar:
                continue
            if x_lo + collar <= x < x_hi - collar and y_lo + collar <= y <= y_hi - collar:
                return INSIDE
            verdict = BOUNDARY
        return verdict

    def column(self, x: Any) -> Optional[Tuple[Any, Any]]:
        i = bisect.bisect_right(self.lows, x) - 1
        if i < 0 or x >= self.bounds[i][1]:
            return None
        return self.bounds[i][2], self.bounds[i][3]


def classify(
    domain: PlanarDomain,
    point: PlanarPoint,
    collar: Any = None,
    index: Optional[FiberIndex] = None,
) -> str:
    """inside | boundary | outside, with a collar of width 2^-40 by default."""

    if collar is None:
        collar = 2.0 ** -DEFAULT_COLLAR_BITS
    index = index or FiberIndex(domain, as_float=isinstance(point.x, float))
    x, y = _real(point.x, domain.precision_bits), _real(point.y, domain.precision_bits)
    return index.classify(x, y, collar)


# ---------------------------------------------------------------------------
# Maps
# ---------------------------------------------------------------------------

def _ext_step(ctx: HeckeContext, p: PlanarPoint, kernel: Optional[OrbitKernel]) -> Tuple[PlanarPoint, MediantSymbol]:
    if p.is_exact:
        symbol = exact_mediant_symbol(ctx.ring, p.x)
        matrix = inverse_symbol_matrix(ctx.ring, symbol)
        return PlanarPoint(matrix.apply(p.x), matrix.apply(p.y)), symbol

    kernel = kernel or OrbitKernel(ctx)
    with kernel.precision():
        x, y = _coord(kernel, p.x), _coord(kernel, p.y)
        if not kernel.in_mediant_interval(x):
            raise OutOfIntervalError(f"x={p.x} outside [-lambda/2, 2/lambda)")
        symbol = kernel.mediant_symbol(x)
        return PlanarPoint(kernel.act(symbol, x), kernel.act(symbol, y)), symbol


def nat_ext_step(ctx: HeckeContext, p: PlanarPoint, kernel: Optional[OrbitKernel] = None) -> PlanarPoint:
    """S_hat(x, y) = (M^-1 x, M^-1 y) with M the branch matrix at x."""

    return _ext_step(ctx, p, kernel)[0]


def rosen_ext_step(ctx: HeckeContext, p: PlanarPoint, kernel: Optional[OrbitKernel] = None) -> PlanarPoint:
    """T_hat(x, y), both coordinates moved by [[-r lambda, sgn x], [1, 0]]."""

    if p.is_exact:
        image, eps, r = exact_rosen_step(ctx.ring, p.x)
        if eps == 0:
            raise TerminalOrbitError("T_hat is undefined at x = 0")
        matrix = rosen_digit_matrix(ctx.ring, Digit(eps, r)).inverse()
        return PlanarPoint(image, matrix.apply(p.y))

    kernel = kernel or OrbitKernel(ctx)
    with kernel.precision():
        x, y = _coord(kernel, p.x), _coord(kernel, p.y)
        if not kernel.in_rosen_interval(x):
            raise OutOfIntervalError(f"x={p.x} outside [-lambda/2, lambda/2)")
        if x == 0:
            raise TerminalOrbitError("T_hat is undefined at x = 0")
        digit = kernel.rosen_digit(x)
        return PlanarPoint(kernel.rosen_act(digit, x), kernel.rosen_act(digit, y))


def induced_ext_step(
    ctx: HeckeContext,
    p: PlanarPoint,
    kernel: Optional[OrbitKernel] = None,
    max_steps: int = 100_000,
) -> Tuple[PlanarPoint, int]:
    """Iterate S_hat through its next U-symbol; returns the point and the number of steps."""

    point = p
    for steps in range(1, max_steps + 1):
        point, symbol = _ext_step(ctx, point, kernel)
        if symbol is MediantSymbol.IDENT:
            raise TerminalOrbitError("orbit reached x = 0")
        if symbol.is_u:
            return point, steps
    raise TerminalOrbitError(f"no U-step within {max_steps} steps")


def bks_step(ctx: HeckeContext, point: Tuple[Any, Any], kernel: Optional[OrbitKernel] = None) -> Tuple[Any, Any]:
    """(t, v) -> (T t, 1/(lambda r(t) + sgn(t) v))."""

    kernel = kernel or OrbitKernel(ctx)
    with kernel.precision():
        t, v = kernel.convert(point[0]), kernel.convert(point[1])
        if t == 0:
            raise TerminalOrbitError("the extension map is undefined at t = 0")
        digit = kernel.rosen_digit(t)
        return kernel.rosen_act(digit, t), 1 / (kernel.lam * digit.r + digit.eps * v)


# ---------------------------------------------------------------------------
# Dual map
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DualStep:
    value: Any
    branch: str
    derivative: Any


def _kernel_R(ctx: HeckeContext, kernel: OrbitKernel) -> Any:
    if ctx.is_even:
        return kernel.convert(1)
    with kernel.precision():
        lam = kernel.lam
        return kernel.convert(((lam - 2) + mp.sqrt((2 - lam) ** 2 + 4)) / 2)


def dual_partition(ctx: HeckeContext, kernel: Optional[OrbitKernel] = None) -> Dict[str, Tuple[Any, Any]]:
    """Endpoints of B#(i..iv); (iv) is open at -lambda, (iii) closed at 0."""

    kernel = kernel or OrbitKernel(ctx)
    R = _kernel_R(ctx, kernel)
    with kernel.precision():
        lam = kernel.lam
        return {
            "iv": (kernel.ninf, -lam),
            "i": (-lam, -1 / R),
            "ii": (-1 / R, -1 / lam),
            "iii": (-1 / lam, kernel.zero),
        }


def dual_step(ctx: HeckeContext, y: Any, kernel: Optional[OrbitKernel] = None) -> DualStep:
    kernel = kernel or OrbitKernel(ctx)
    R = _kernel_R(ctx, kernel)
    with kernel.precision():
        y = kernel.convert(y)
        if y > 0:
            raise OutOfIntervalError("the dual map is defined on (-inf, 0]")
        lam = kernel.lam
        if y < -lam:
            branch = "iv"
        elif y < -1 / R:
            branch = "i"
        elif y < -1 / lam:
            branch = "ii"
        else:
            branch = "iii"
        matrix = kernel.forward[DUAL_BRANCHES[branch]]
        _, _, c, d = matrix
        if kernel.is_infinite(y):
            derivative = kernel.zero
        else:
            derivative = 1 / ((c * y + d) ** 2)
        return DualStep(kernel.mobius(matrix, y), branch, derivative)


# ---------------------------------------------------------------------------
# Measures
# ---------------------------------------------------------------------------

def rect_measure(a: Any, b: Any, c: Any, d: Any) -> Any:
    """Measure of [a, b] x [c, d] under dx dy/(x - y)^2; c may be -inf.

    Rectangles below the diagonal (d <= a) use
    log((b - d)(a - c) / ((a - d)(b - c))); those above it are mirrored.
    A rectangle whose corner touches the diagonal has infinite measure.
    """

    a, b, c, d = (mp.mpf(v) for v in (a, b, c, d))
    if b < a or d < c:
        raise ValueError("rectangle bounds must satisfy a <= b and c <= d")
    if not mp.isinf(c) and c >= b:
        return rect_measure(c, d, a, b)
    if d > a:
        raise DiagonalCrossingError(f"[{a}, {b}] x [{c}, {d}] crosses the diagonal")
    if a == b or c == d:
        return mp.zero
    if d == a:
        return mp.inf
    if mp.isinf(c):
        return mp.log((b - d) / (a - d))
    return mp.log((b - d) * (a - c) / ((a - d) * (b - c)))


def _clipped_fiber_measure(fiber: Fiber, t: Any) -> Any:
    """Measure of fiber n {x - y > t}.

    Above x the fiber contributes 1/max(x - y_hi, t) - 1/(x - y_lo) for
    x > y_lo + t; the integral is split at x = y_hi + t.
    """

    a, b, c, e = fiber.x_lo, fiber.x_hi, fiber.y_lo, fiber.y_hi
    bottomless = mp.isinf(c)
    lo = a if bottomless else max(a, c + t)
    if lo >= b:
        return mp.zero
    total = mp.zero
    split = e + t
    upper = min(b, split)
    if upper > lo:
        total += (upper - lo) / t
        if not bottomless:
            total -= mp.log((upper - c) / (lo - c))
    start = max(lo, split)
    if b > start:
        total += mp.log((b - e) / (start - e))
        if not bottomless:
            total -= mp.log((b - c) / (start - c))
    return total


def domain_measure(domain: PlanarDomain, clip_t: Any = None) -> Any:
    """Total measure, or the measure of the part with x - y > clip_t."""

    with mp.workprec(domain.precision_bits):
        if clip_t is not None:
            t = mp.mpf(clip_t)
            if t <= 0:
                raise ValueError("clip_t must be positive")
            return mp.fsum(_clipped_fiber_measure(f, t) for f in domain.fibers)
        parts = [rect_measure(f.x_lo, f.x_hi, f.y_lo, f.y_hi) for f in domain.fibers]
        if any(mp.isinf(m) for m in parts):
            raise DivergentMeasureError(f"{domain.label} touches the diagonal; pass clip_t")
        return mp.fsum(parts)


def invariant_density(ctx: HeckeContext, domain: PlanarDomain, x: Any, normalized: bool = False) -> Any:
    """f(x) = integral of dy/(x - y)^2 over the fiber above x."""

    with mp.workprec(domain.precision_bits):
        x = mp.mpf(x)
        i = domain.fiber_at(x)
        if i is None:
            raise OutOfIntervalError(f"x={x} is outside {domain.label}")
        fiber = domain.fibers[i]
        if x <= fiber.y_hi:
            return mp.inf
        value = 1 / (x - fiber.y_hi)
        if not fiber.unbounded:
            value -= 1 / (x - fiber.y_lo)
        if normalized:
            value /= domain_measure(domain)
        return value


def linearity_threshold(ctx: HeckeContext, domain: PlanarDomain) -> Any:
    """Smallest t with t * measure(domain n {x - y > t}) = lambda, by bisection."""

    bits = domain.precision_bits
    with mp.workprec(bits):
        lam = ctx.lambda_float
        eps = mp.ldexp(1, -(bits // 2))

        def deficit(t: Any) -> Any:
            return lam - t * domain_measure(domain, t)

        lo, hi = mp.ldexp(1, -10), mp.mpf(1)
        for _ in range(64):
            if deficit(hi) <= eps:
                break
            lo, hi = hi, 2 * hi
        else:
            raise ArithmeticInvariantError("clipped measure never reaches lambda/t")
        if deficit(lo) <= eps:
            raise ArithmeticInvariantError("clipped measure is already linear at the lower bracket")
        for _ in range(bits):
            mid = (lo + hi) / 2
            if deficit(mid) > eps:
                lo = mid
            else:
                hi = mid
        return hi


# ---------------------------------------------------------------------------
# Lenstra constants from the domain geometry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StaircaseCorner:
    x: Any
    y: Any
    t: Any

    def to_mapping(self, digits: int = 30) -> Dict[str, str]:
        return {"x": format_real(self.x, digits), "y": format_real(self.y, digits), "t": format_real(self.t, digits)}


@dataclass(frozen=True)
class LenstraGeometry:
    k: int
    variant: str
    t: Any
    constant: Any
    corners: Tuple[StaircaseCorner, ...]
    argmax: int
    closed_form: Any
    agrees: bool
    k4_candidates: Optional[Dict[str, Any]] = None

    def as_dict(self, digits: int = 30) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "k": self.k,
            "variant": self.variant,
            "t": format_real(self.t, digits),
            "constant": format_real(self.constant, digits),
            "closed_form": format_real(self.closed_form, digits),
            "agrees": self.agrees,
            "argmax": self.argmax,
            "corners": [c.to_mapping(digits) for c in self.corners],
        }
        if self.k4_candidates:
            data["k4_candidates"] = {name: format_real(v, digits) for name, v in self.k4_candidates.items()}
        return data


def _staircase(pieces: Sequence[Fiber], tol: Any) -> List[StaircaseCorner]:
    """Right-hand corners of the column that every x carries up from y = -inf."""

    breaks = sorted({p.x_lo for p in pieces} | {p.x_hi for p in pieces})
    corners: List[StaircaseCorner] = []
    for u, v in zip(breaks, breaks[1:]):
        if v - u <= tol:
            continue
        mid = (u + v) / 2
        stack = [p for p in pieces if p.x_lo < mid < p.x_hi]
        floors = [p.y_hi for p in stack if p.unbounded]
        if not floors:
            raise ArithmeticInvariantError(f"no unbounded column above x={mid}")
        top = max(floors)
        grown = True
        while grown:
            grown = False
            for p in stack:
                if p.y_lo <= top + tol and p.y_hi > top + tol:
                    top, grown = p.y_hi, True
        corners.append(StaircaseCorner(v, top, v - top))
    return corners


def geometric_lenstra(
    ctx: HeckeContext,
    variant: str = "mediant",
    domains: Optional[Tuple[PlanarDomain, PlanarDomain]] = None,
) -> LenstraGeometry:
    """Lenstra constant as 1/t, t the largest x - y at a staircase corner.

    The mediant variant first moves the bounded fibers of OmegaStar by
    (-lambda, -lambda), which preserves the measure and x - y.
    """

    base, star = domains or build_domains(ctx)
    constants = closed_form_constants(ctx)
    with mp.workprec(ctx.precision_bits):
        lam = ctx.lambda_float
        if variant == "rosen":
            pieces = list(base.fibers)
            expected = constants.rosen_lenstra
        elif variant == "mediant":
            pieces = [f if f.unbounded else f.translated(-lam) for f in star.fibers]
            expected = constants.mediant_lenstra
        else:
            raise ValueError(f"unknown variant {variant!r}")
        corners = _staircase(pieces, ctx.error_bound)
        argmax = max(range(len(corners)), key=lambda i: corners[i].t)
        t = corners[argmax].t
        constant = 1 / t
        agrees = bool(abs(constant - expected) < mp.mpf("1e-10"))
    if not agrees and ctx.k != 4:
        raise ArithmeticInvariantError(
            f"{variant} Lenstra constant {constant} disagrees with the closed form {expected}"
        )
    candidates = constants.k4_candidates if variant == "mediant" else None
    return LenstraGeometry(ctx.k, variant, t, constant, tuple(corners), argmax, expected, agrees, candidates)


# ---------------------------------------------------------------------------
# Witness orbit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WitnessOrbit:
    k: int
    parity: str
    points: Tuple[PlanarPoint, ...]
    symbols: Tuple[MediantSymbol, ...]
    period: int
    induced_period: int
    theta_values: Tuple[Any, ...]
    min_theta: Any
    hurwitz_C: Any
    equality_indices: Tuple[int, ...]
    extra_indices: Tuple[int, ...]
    exact: bool
    certificate: Dict[str, Any] = field(default_factory=dict)

    def to_mapping(self, digits: int = 30) -> Dict[str, Any]:
        return {
            "k": self.k,
            "parity": self.parity,
            "period": self.period,
            "induced_period": self.induced_period,
            "exact": self.exact,
            "points": [p.to_mapping(digits) for p in self.points],
            "symbols": [s.value for s in self.symbols],
            "theta": [format_real(v, digits) for v in self.theta_values],
            "min_theta": format_real(self.min_theta, digits),
            "hurwitz_C": format_real(self.hurwitz_C, digits),
            "equality_indices": list(self.equality_indices),
            "extra_indices": list(self.extra_indices),
            "certificate": {
                key: value if isinstance(value, (bool, int, str)) else format_real(value, 10)
                for key, value in self.certificate.items()
            },
        }


def witness_orbit(ctx: HeckeContext, precision_bits: int = 512) -> WitnessOrbit:
    """The periodic S_hat-orbit of (tau_0, K_1) on which Theta stays >= C(k).

    Even k runs exactly in Q(lambda) from (1 - lambda, -(lambda + 1)); odd k
    runs at ``precision_bits`` from (R - lambda, -(lambda + 1/R)) and is
    certified by its return distance and the multipliers of the period map.
    """

    limit = 8 * ctx.k + 8
    if ctx.is_even:
        return _even_witness(ctx, limit)
    return _odd_witness(ctx, max(precision_bits, ctx.precision_bits), limit)


def _even_witness(ctx: HeckeContext, limit: int) -> WitnessOrbit:
    ring = ctx.ring
    lam = ring.lam
    start = PlanarPoint(ProjectivePoint(1 - lam, ring.one), ProjectivePoint(-(lam + 1), ring.one))
    points, symbols = _collect_period(ctx, start, None, limit, lambda p: p.x == start.x and p.y == start.y)

    two = ProjectivePoint.of(ring, 2)
    bits = ctx.precision_bits
    separations = [p.x - p.y for p in points]
    # min Theta = 1/max(x - y)
    widest = max(separations, key=lambda s: s.to_mpf(bits))
    if separations and any(s.compare(two) > 0 for s in separations):
        raise CertificationError("Theta drops below 1/2 on the even witness orbit")
    equal = tuple(i for i, s in enumerate(separations) if s == two)
    thetas = tuple(s.reciprocal().to_mpf(bits) for s in separations)
    with mp.workprec(bits):
        hurwitz = mp.mpf(1) / 2
        certificate = _period_certificate(ctx, symbols, start.x.to_mpf(bits), start.y.to_mpf(bits), bits)
    certificate["return_distance"] = mp.zero
    certificate["exact_return"] = True
    return _witness(ctx, points, symbols, thetas, widest.reciprocal().to_mpf(bits), hurwitz, equal, True, certificate)


def _odd_witness(ctx: HeckeContext, bits: int, limit: int) -> WitnessOrbit:
    kernel = OrbitKernel(ctx, bits)
    with kernel.precision():
        lam = kernel.lam
        R = _kernel_R(ctx, kernel)
        hurwitz = 1 / (R + 1 / R)
        x0, y0 = R - lam, -(lam + 1 / R)
        tol = mp.ldexp(1, -100)
        start = PlanarPoint(x0, y0)

        def returned(p: PlanarPoint) -> bool:
            return abs(p.x - x0) < tol and abs(p.y - y0) < tol

        points, symbols = _collect_period(ctx, start, kernel, limit, returned)
        last = points[-1]
        closing = _ext_step(ctx, last, kernel)[0]
        distance = max(abs(closing.x - x0), abs(closing.y - y0))

        thetas = tuple(1 / (p.x - p.y) for p in points)
        minimum = min(thetas)
        if minimum < hurwitz - mp.mpf("1e-12"):
            raise CertificationError(f"Theta={minimum} drops below C(k) on the odd witness orbit")
        equal = tuple(i for i, v in enumerate(thetas) if abs(v - hurwitz) < mp.ldexp(1, -90))
        certificate = _period_certificate(ctx, symbols, x0, y0, bits)
    certificate["return_distance"] = distance
    certificate["exact_return"] = False
    if not certificate["fixed_point_residual"] < tol:
        raise CertificationError("period map does not fix the witness point")
    return _witness(ctx, points, symbols, thetas, minimum, hurwitz, equal, False, certificate)


def _collect_period(ctx, start, kernel, limit, returned) -> Tuple[List[PlanarPoint], List[MediantSymbol]]:
    points, symbols = [start], []
    point = start
    for _ in range(limit):
        point, symbol = _ext_step(ctx, point, kernel)
        symbols.append(symbol)
        if returned(point):
            return points, symbols
        points.append(point)
    raise CertificationError(f"witness orbit did not close within {limit} steps")


def _period_certificate(ctx: HeckeContext, symbols: Sequence[MediantSymbol], x0: Any, y0: Any, bits: int) -> Dict[str, Any]:
    """Fixed-point residual and multipliers of the period map P = (M_1 ... M_p)^-1."""

    product = ctx.ring.identity()
    for symbol in symbols:
        product = product @ symbol_matrix(ctx.ring, symbol)
    period_map = product.inverse()
    with mp.workprec(bits):
        a, b, c, d = (e.to_mpf(bits) for e in period_map.entries())
        den_x, den_y = c * x0 + d, c * y0 + d
        residual = max(abs((a * x0 + b) / den_x - x0), abs((a * y0 + b) / den_y - y0))
        x_multiplier = 1 / den_x ** 2
        y_multiplier = 1 / den_y ** 2
    if not (y_multiplier < 1 < x_multiplier):
        raise CertificationError("period map is not hyperbolic at the witness point")
    return {
        "fixed_point_residual": residual,
        "x_multiplier": x_multiplier,
        "y_multiplier": y_multiplier,
    }


def _witness(ctx, points, symbols, thetas, minimum, hurwitz, equal, exact, certificate) -> WitnessOrbit:
    extra = tuple(i for i in range(1, len(points)) if not symbols[i - 1].is_u)
    return WitnessOrbit(
        k=ctx.k,
        parity=ctx.parity.kind,
        points=tuple(points),
        symbols=tuple(symbols),
        period=len(symbols),
        induced_period=sum(1 for s in symbols if s.is_u),
        theta_values=tuple(thetas),
        min_theta=minimum,
        hurwitz_C=hurwitz,
        equality_indices=equal,
        extra_indices=extra,
        exact=exact,
        certificate=certificate,
    )


# ---------------------------------------------------------------------------
# Image decomposition and audits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ImagePiece:
    fiber: int
    symbol: MediantSymbol
    source: Fiber
    image: Fiber

    def to_mapping(self, digits: int = 30) -> Dict[str, Any]:
        return {
            "fiber": self.fiber,
            "symbol": self.symbol.value,
            "source": self.source.to_mapping(digits),
            "image": self.image.to_mapping(digits),
        }


@dataclass
class AuditReport:
    """Counts, worst deviation and the first offending points of one audit."""

    name: str
    tolerance: Any = 0.0
    checked: int = 0
    boundary: int = 0
    violation_count: int = 0
    max_deviation: Any = 0.0
    violations: List[Dict[str, Any]] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violation_count == 0

    def record(self, deviation: Any, **where: Any) -> None:
        self.checked += 1
        if deviation > self.max_deviation:
            self.max_deviation = deviation
        if not deviation <= self.tolerance:
            self.flag(deviation=deviation, **where)

    def flag(self, **where: Any) -> None:
        self.violation_count += 1
        if len(self.violations) < MAX_REPORTED_VIOLATIONS:
            self.violations.append({key: _plain(value) for key, value in where.items()})

    def merge(self, other: "AuditReport") -> "AuditReport":
        merged = AuditReport(self.name, self.tolerance)
        merged.checked = self.checked + other.checked
        merged.boundary = self.boundary + other.boundary
        merged.violation_count = self.violation_count + other.violation_count
        merged.max_deviation = max(self.max_deviation, other.max_deviation)
        merged.violations = (self.violations + other.violations)[:MAX_REPORTED_VIOLATIONS]
        merged.details = {**self.details, **other.details}
        return merged

    def as_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "boundary": self.boundary,
            "violations": self.violation_count,
            "max_deviation": _plain(self.max_deviation),
            "tolerance": _plain(self.tolerance),
            "offending": self.violations,
            "details": {key: _plain(value) for key, value in self.details.items()},
        }


def _plain(value: Any) -> Any:
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, MediantSymbol):
        return value.value
    try:
        return format_real(value, 12)
    except (TypeError, ValueError):
        return str(value)


def _image_interval(kernel: OrbitKernel, symbol: MediantSymbol, lo: Any, hi: Any) -> Tuple[Any, Any]:
    ends = (kernel.act(symbol, lo), kernel.act(symbol, hi))
    return min(ends), max(ends)


def image_decomposition(
    ctx: HeckeContext,
    domain: Optional[PlanarDomain] = None,
    kernel: Optional[OrbitKernel] = None,
) -> List[ImagePiece]:
    """Each fiber split at the branch cuts of S and moved by its branch matrix."""

    domain = domain or build_domains(ctx)[1]
    kernel = kernel or OrbitKernel(ctx)
    pieces: List[ImagePiece] = []
    with kernel.precision():
        cuts = (-kernel.cut, kernel.zero, kernel.cut)
        for index, fiber in enumerate(domain.fibers):
            x_lo, x_hi = kernel.convert(fiber.x_lo), kernel.convert(fiber.x_hi)
            y_lo, y_hi = kernel.convert(fiber.y_lo), kernel.convert(fiber.y_hi)
            edges = [x_lo] + [c for c in cuts if x_lo < c < x_hi] + [x_hi]
            for lo, hi in zip(edges, edges[1:]):
                symbol = kernel.mediant_symbol((lo + hi) / 2)
                ix = _image_interval(kernel, symbol, lo, hi)
                iy = _image_interval(kernel, symbol, y_lo, y_hi)
                pieces.append(ImagePiece(index, symbol, Fiber(lo, hi, y_lo, y_hi), Fiber(ix[0], ix[1], iy[0], iy[1])))
    return pieces


def _close(a: Any, b: Any, tol: Any) -> bool:
    if mp.isinf(a) or mp.isinf(b):
        return a == b
    return abs(a - b) <= tol * max(1, abs(a))


def tiling_audit(
    ctx: HeckeContext,
    pieces: Optional[Sequence[ImagePiece]] = None,
    domain: Optional[PlanarDomain] = None,
    collar_bits: int = DEFAULT_COLLAR_BITS,
) -> AuditReport:
    """The image pieces are pairwise disjoint and cover the domain, slab by slab."""

    domain = domain or build_domains(ctx)[1]
    kernel = OrbitKernel(ctx)
    pieces = pieces if pieces is not None else image_decomposition(ctx, domain, kernel)
    report = AuditReport("tiling")
    index = FiberIndex(domain, as_float=False)
    with kernel.precision():
        tol = mp.ldexp(1, -collar_bits)
        report.tolerance = tol
        raw = sorted({p.image.x_lo for p in pieces} | {p.image.x_hi for p in pieces} | set(index.lows) | {domain.x_max})
        breaks = [raw[0]]
        for value in raw[1:]:
            if value - breaks[-1] > tol:
                breaks.append(value)
        for u, v in zip(breaks, breaks[1:]):
            mid = (u + v) / 2
            column = index.column(mid)
            stack = sorted(
                ((p.image.y_lo, p.image.y_hi) for p in pieces if p.image.x_lo < mid < p.image.x_hi),
                key=lambda iv: iv[0],
            )
            report.checked += 1
            if column is None:
                if stack:
                    report.flag(x=mid, problem="image outside the domain")
                continue
            if not stack:
                report.flag(x=mid, problem="slab not covered")
                continue
            if not _close(stack[0][0], column[0], tol) or not _close(stack[-1][1], column[1], tol):
                report.flag(x=mid, problem="column ends do not match")
            for (_, top), (bottom, _) in zip(stack, stack[1:]):
                if not _close(top, bottom, tol):
                    report.flag(x=mid, problem="overlap" if bottom < top else "gap", at=top)
        report.details["slabs"] = len(breaks) - 1
        report.details["pieces"] = len(pieces)
    return report


def _sample_domain(
    domain: PlanarDomain,
    n: int,
    rng: np.random.Generator,
    y_floor: float,
) -> Tuple[np.ndarray, np.ndarray]:
    """Uniform points of the domain cut off below at ``y_floor``."""

    with mp.workprec(domain.precision_bits):
        boxes = np.array(
            [[float(f.x_lo), float(f.x_hi), max(float(f.y_lo), y_floor), float(f.y_hi)] for f in domain.fibers]
        )
    areas = (boxes[:, 1] - boxes[:, 0]) * np.clip(boxes[:, 3] - boxes[:, 2], 0.0, None)
    choice = rng.choice(len(boxes), size=n, p=areas / areas.sum())
    picked = boxes[choice]
    xs = picked[:, 0] + (picked[:, 1] - picked[:, 0]) * rng.random(n)
    ys = picked[:, 2] + (picked[:, 3] - picked[:, 2]) * rng.random(n)
    return xs, ys


def _blocks(n: int, block_size: int) -> Iterable[Tuple[int, int]]:
    for block, start in enumerate(range(0, n, block_size)):
        yield block, min(block_size, n - start)


def check_bijectivity(
    ctx: HeckeContext,
    n_samples: int,
    seed: int,
    *,
    precision_bits: int = 53,
    collar_bits: int = DEFAULT_COLLAR_BITS,
    y_max_factor: float = DEFAULT_Y_MAX_FACTOR,
    block_size: int = 10_000,
) -> AuditReport:
    """Forward containment, unique preimages and the tiling of OmegaStar."""

    from .ergodic_stats import orbit_rng

    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    _, star = build_domains(ctx)
    kernel = OrbitKernel(ctx, precision_bits)
    index = FiberIndex(star, as_float=kernel.is_float)
    report = AuditReport("bijectivity")
    forward_outside = 0
    counts: Dict[int, int] = {}
    with kernel.precision():
        collar = kernel.convert(mp.ldexp(1, -collar_bits))
        y_floor = -float(y_max_factor) * float(ctx.lambda_float)
        for block, size in _blocks(n_samples, block_size):
            xs, ys = _sample_domain(star, size, orbit_rng(seed, block), y_floor)
            for x, y in zip(xs, ys):
                x, y = kernel.convert(x), kernel.convert(y)
                if index.classify(x, y, collar) != INSIDE or kernel.mediant_margin(x) <= collar:
                    report.boundary += 1
                    continue
                symbol = kernel.mediant_symbol(x)
                image = (kernel.act(symbol, x), kernel.act(symbol, y))
                report.checked += 1
                if index.classify(image[0], image[1], collar) == OUTSIDE:
                    forward_outside += 1
                    report.flag(kind="forward", x=x, y=y, symbol=symbol)
                preimages, ambiguous = _preimage_count(kernel, index, x, y, collar)
                if ambiguous:
                    report.boundary += 1
                    continue
                counts[preimages] = counts.get(preimages, 0) + 1
                if preimages != 1:
                    report.flag(kind="preimage", x=x, y=y, count=preimages)
    tiling = tiling_audit(ctx, domain=star, collar_bits=collar_bits)
    if not tiling.passed:
        report.violation_count += tiling.violation_count
        report.violations.extend(tiling.violations[: MAX_REPORTED_VIOLATIONS])
    report.details.update(
        {
            "samples": n_samples,
            "forward_outside": forward_outside,
            "preimage_counts": {str(k): v for k, v in sorted(counts.items())},
            "tiling": tiling.as_dict(),
            "precision_bits": kernel.bits,
        }
    )
    logger.debug(
        "[rosen-mediant] bijectivity k=%d: %d checked, %d boundary", ctx.k, report.checked, report.boundary
    )
    return report


def _preimage_count(kernel: OrbitKernel, index: FiberIndex, x: Any, y: Any, collar: Any) -> Tuple[int, bool]:
    count = 0
    for symbol in GENERATORS:
        matrix = kernel.forward[symbol]
        px, py = kernel.mobius(matrix, x), kernel.mobius(matrix, y)
        if kernel.is_infinite(px):
            continue
        where = index.classify(px, py, collar)
        if where == OUTSIDE:
            continue
        if where == BOUNDARY or kernel.mediant_margin(px) <= collar:
            return count, True
        if kernel.mediant_symbol(px) is symbol:
            count += 1
    return count, False


def _branch_cylinder(kernel: OrbitKernel, symbol: MediantSymbol) -> Tuple[Any, Any]:
    return {
        MediantSymbol.UMINUS: (-kernel.half_lam, -kernel.cut),
        MediantSymbol.VMINUS: (-kernel.cut, kernel.zero),
        MediantSymbol.VPLUS: (kernel.zero, kernel.cut),
        MediantSymbol.UPLUS: (kernel.cut, kernel.two_over_lam),
    }[symbol]


def check_invariance(
    ctx: HeckeContext,
    rectangles: Iterable[Tuple[Any, Any, Any, Any]],
    kernel: Optional[OrbitKernel] = None,
    tolerance: Any = 1e-12,
) -> AuditReport:
    """measure(rect) == measure(S_hat(rect)) for rectangles inside one branch cylinder."""

    kernel = kernel or OrbitKernel(ctx)
    report = AuditReport("invariance", tolerance)
    with kernel.precision():
        for a, b, c, d in rectangles:
            a, b, c, d = (kernel.convert(v) for v in (a, b, c, d))
            symbol = kernel.mediant_symbol((a + b) / 2)
            if symbol is MediantSymbol.IDENT:
                raise OutOfIntervalError("rectangle is centred on x = 0")
            lo, hi = _branch_cylinder(kernel, symbol)
            if a < lo or b > hi:
                raise OutOfIntervalError(f"[{a}, {b}] straddles a branch cut of S")
            ix = _image_interval(kernel, symbol, a, b)
            iy = _image_interval(kernel, symbol, c, d)
            before = rect_measure(a, b, c, d)
            after = rect_measure(ix[0], ix[1], iy[0], iy[1])
            report.record(abs(before - after) / max(1, abs(before)), rect=[a, b, c, d], symbol=symbol)
    return report


def random_rectangles(
    ctx: HeckeContext,
    n: int,
    seed: int,
    y_max_factor: float = DEFAULT_Y_MAX_FACTOR,
) -> List[Tuple[float, float, float, float]]:
    """Admissible rectangles drawn inside the branch pieces of OmegaStar, off the diagonal."""

    from .ergodic_stats import orbit_rng

    rng = orbit_rng(seed, 0)
    kernel = OrbitKernel(ctx, 53)
    sources = [p.source for p in image_decomposition(ctx, kernel=kernel)]
    y_floor = -float(y_max_factor) * float(ctx.lambda_float)
    rectangles: List[Tuple[float, float, float, float]] = []
    attempts = 0
    while len(rectangles) < n:
        attempts += 1
        if attempts > 1000 * n:
            raise ArithmeticInvariantError("could not draw admissible rectangles")
        box = sources[int(rng.integers(len(sources)))]
        a, b = np.sort(rng.uniform(box.x_lo, box.x_hi, 2))
        c, d = np.sort(rng.uniform(max(box.y_lo, y_floor), box.y_hi, 2))
        if b - a < 1e-6 or d - c < 1e-6 or d >= a:
            continue
        rectangles.append((float(a), float(b), float(c), float(d)))
    return rectangles


def _relative(a: Any, b: Any) -> Any:
    if mp.isinf(a) or mp.isinf(b):
        return 0.0 if a == b else float("inf")
    return abs(a - b) / max(1, abs(a))


def check_dual_equation(
    ctx: HeckeContext,
    n_points: int,
    seed: int,
    kernel: Optional[OrbitKernel] = None,
    tolerance: Any = 1e-12,
    y_max_factor: float = DEFAULT_Y_MAX_FACTOR,
) -> AuditReport:
    """K(Sx, y)|S'(x)| = K(x, T#y)|T#'(y)| with K = 1/(x - y)^2 and matching branches."""

    from .ergodic_stats import orbit_rng

    kernel = kernel or OrbitKernel(ctx)
    rng = orbit_rng(seed, 1)
    partition = dual_partition(ctx, kernel)
    branch_of = {symbol: name for name, symbol in DUAL_BRANCHES.items()}
    report = AuditReport("dual_equation", tolerance)
    with kernel.precision():
        lo_x, hi_x = float(-kernel.half_lam), float(kernel.two_over_lam)
        y_floor = -float(y_max_factor) * float(kernel.lam)
        for _ in range(n_points):
            x = kernel.convert(rng.uniform(lo_x, hi_x))
            symbol = kernel.mediant_symbol(x)
            if symbol is MediantSymbol.IDENT:
                continue
            name = branch_of[symbol]
            y_lo, y_hi = partition[name]
            y_lo = max(float(y_lo), y_floor)
            y = kernel.convert(rng.uniform(y_lo, float(y_hi)))
            step = dual_step(ctx, y, kernel)
            if step.branch != name:
                report.boundary += 1
                continue
            sx = kernel.act(symbol, x)
            lhs = kernel.derivative(symbol, x) / (sx - y) ** 2
            rhs = step.derivative / (x - step.value) ** 2
            report.record(abs(lhs - rhs) / max(abs(lhs), abs(rhs)), x=x, y=y, branch=name)
    return report


def check_induced_composition(
    ctx: HeckeContext,
    n_points: int,
    seed: int,
    kernel: Optional[OrbitKernel] = None,
    tolerance: Any = 1e-12,
    y_max_factor: float = DEFAULT_Y_MAX_FACTOR,
    max_steps: int = 100_000,
) -> AuditReport:
    """T_hat(p) equals S_hat iterated through its next U-symbol, after r_1(x) steps."""

    from .ergodic_stats import orbit_rng

    kernel = kernel or OrbitKernel(ctx)
    base, _ = build_domains(ctx)
    report = AuditReport("induced_composition", tolerance)
    xs, ys = _sample_domain(base, n_points, orbit_rng(seed, 2), -float(y_max_factor) * float(ctx.lambda_float))
    for x, y in zip(xs, ys):
        p = PlanarPoint(kernel.convert(x), kernel.convert(y))
        with kernel.precision():
            if p.x == 0 or kernel.rosen_margin(p.x, kernel.rosen_digit(p.x).r) <= 2 ** -DEFAULT_COLLAR_BITS:
                report.boundary += 1
                continue
            r = kernel.rosen_digit(p.x).r
        try:
            induced, steps = induced_ext_step(ctx, p, kernel, max_steps)
        except TerminalOrbitError:
            report.boundary += 1
            continue
        direct = rosen_ext_step(ctx, p, kernel)
        with kernel.precision():
            deviation = max(_relative(direct.x, induced.x), _relative(direct.y, induced.y))
        if steps != r:
            report.flag(kind="return_time", x=p.x, steps=steps, digit=r)
        report.record(deviation, x=p.x, y=p.y)
    return report


def check_conjugacy(
    ctx: HeckeContext,
    n_orbits: int,
    length: int,
    seed: int,
    kernel: Optional[OrbitKernel] = None,
    tolerance: Any = 1e-12,
    y_max_factor: float = DEFAULT_Y_MAX_FACTOR,
) -> AuditReport:
    """(x, y) -> (x, -1/y) carries T_hat-orbits on Omega0 onto orbits of the explicit extension map."""

    from .ergodic_stats import orbit_rng

    kernel = kernel or OrbitKernel(ctx)
    base, _ = build_domains(ctx)
    report = AuditReport("conjugacy", tolerance)
    xs, ys = _sample_domain(base, n_orbits, orbit_rng(seed, 3), -float(y_max_factor) * float(ctx.lambda_float))
    for x, y in zip(xs, ys):
        with kernel.precision():
            p = PlanarPoint(kernel.convert(x), kernel.convert(y))
            tv = (p.x, -1 / p.y)
        for step in range(length):
            try:
                p = rosen_ext_step(ctx, p, kernel)
                tv = bks_step(ctx, tv, kernel)
            except TerminalOrbitError:
                break
            with kernel.precision():
                deviation = _relative(-1 / p.y, tv[1])
                if p.x != tv[0]:
                    report.flag(kind="x", step=step, x=p.x, t=tv[0])
            report.record(deviation, step=step, y=p.y, v=tv[1])
    return report


def check_theta_formulas(
    ctx: HeckeContext,
    n_points: int,
    seed: int,
    depth: int = 8,
    tolerance: Any = 1e-10,
) -> AuditReport:
    """theta_(n-1), theta_n from (t_n, v_n) = T^n(x, 0) against q^2 |x - p/q| on the convergents."""

    from .ergodic_stats import orbit_rng

    rng = orbit_rng(seed, 4)
    kernel = OrbitKernel(ctx)
    report = AuditReport("theta_formulas", tolerance)
    half = float(ctx.lambda_float) / 2
    for _ in range(n_points):
        with kernel.precision():
            x = kernel.convert(rng.uniform(-half, half))
        digits = expand(ctx, x, depth)
        if digits.ambiguous or len(digits) == 0:
            report.boundary += 1
            continue
        states = convergents(ctx, digits.digits)
        tv: Tuple[Any, Any] = (x, kernel.zero)
        for n in range(1, len(digits) + 1):
            tv = bks_step(ctx, tv, kernel)
            theta_prev, theta_cur = rosen_theta_pair(tv[0], tv[1])
            prev, cur = states[n - 1], states[n]
            want_prev = theta_direct(ctx, x, prev.p_cur, prev.q_cur)
            want_cur = theta_direct(ctx, x, cur.p_cur, cur.q_cur)
            with kernel.precision():
                deviation = max(_relative(theta_prev, want_prev), _relative(theta_cur, want_cur))
            report.record(deviation, x=x, n=n)
    return report
