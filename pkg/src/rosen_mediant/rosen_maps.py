"""Rosen map T, mediant map S, expansions, convergents and Theta.

Two arithmetic paths share the same branch tables:

* the numeric path runs on Python floats (<= 53 bits) or mpmath reals through
  :class:`OrbitKernel`, with a running error bound and precision doubling
  near branch cuts;
* the exact path runs on :class:`~rosen_mediant.algebraic_ring.ProjectivePoint`
  inputs in Q(lambda), so G_k-rationals terminate with a finite expansion.
"""

from __future__ import annotations

import logging
from contextlib import nullcontext
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Any, ContextManager, Dict, Iterator, List, Optional, Sequence, Tuple, Union

from mpmath import mp

from .algebraic_ring import LambdaRing, MobiusZL, ProjectivePoint, ZLambda, zl_eval, zl_sign
from .errors import ArithmeticInvariantError, OutOfIntervalError, TerminalOrbitError
from .hecke_context import HeckeContext, exact_rosen_step, format_real

logger = logging.getLogger(__name__)

BOUNDARY_MARGIN_FACTOR = 8
MAX_PRECISION_BITS = 4096

Number = Any
Point = Union[Number, ProjectivePoint]


class MediantSymbol(Enum):
    UMINUS = "U-"
    UPLUS = "U+"
    VMINUS = "V-"
    VPLUS = "V+"
    IDENT = "Id"

    @property
    def is_u(self) -> bool:
        return self in (MediantSymbol.UMINUS, MediantSymbol.UPLUS)

    @property
    def is_v(self) -> bool:
        return self in (MediantSymbol.VMINUS, MediantSymbol.VPLUS)


@dataclass(frozen=True)
class Digit:
    """Rosen digit (eps : r)."""

    eps: int
    r: int

    def __post_init__(self) -> None:
        if self.eps not in (-1, 1) or self.r < 1:
            raise ValueError(f"invalid Rosen digit ({self.eps}:{self.r})")

    def __str__(self) -> str:
        return f"({'+' if self.eps > 0 else '-'}1:{self.r})"


# ---------------------------------------------------------------------------
# Numeric kernel
# ---------------------------------------------------------------------------

class OrbitKernel:
    """Branch constants of S and T in a single numeric type.

    At 53 bits or less everything is a Python float; above that, mpmath reals
    and all arithmetic must run inside :meth:`precision`.
    """

    def __init__(self, ctx: HeckeContext, precision_bits: Optional[int] = None) -> None:
        self.ctx = ctx
        self.bits = precision_bits or ctx.precision_bits
        self.is_float = self.bits <= 53
        with self.precision():
            if self.is_float:
                lam: Number = float(ctx.lambda_float)
                self.ninf: Number = float("-inf")
                self.pinf: Number = float("inf")
                self.zero: Number = 0.0
                self.unit: Number = 2.0 ** -52
            else:
                lam = +ctx.lambda_at(self.bits)
                self.ninf = mp.ninf
                self.pinf = mp.inf
                self.zero = mp.zero
                self.unit = mp.ldexp(1, -self.bits)
            self.lam = lam
            self.half_lam = lam / 2
            self.two_over_lam = 2 / lam
            self.cut = 2 / (3 * lam)
            one, nil = self.convert(1), self.convert(0)
            # inverse matrices, i.e. the branches of S
            self.inverse: Dict[MediantSymbol, Tuple[Number, Number, Number, Number]] = {
                MediantSymbol.UMINUS: (lam, one, -one, nil),
                MediantSymbol.UPLUS: (-lam, one, one, nil),
                MediantSymbol.VMINUS: (-one, nil, lam, one),
                MediantSymbol.VPLUS: (one, nil, -lam, one),
                MediantSymbol.IDENT: (one, nil, nil, one),
            }
            # forward matrices, used for preimages
            self.forward: Dict[MediantSymbol, Tuple[Number, Number, Number, Number]] = {
                MediantSymbol.UMINUS: (nil, -one, one, lam),
                MediantSymbol.UPLUS: (nil, one, one, lam),
                MediantSymbol.VMINUS: (-one, nil, lam, one),
                MediantSymbol.VPLUS: (one, nil, lam, one),
                MediantSymbol.IDENT: (one, nil, nil, one),
            }

    def precision(self) -> ContextManager[Any]:
        return nullcontext() if self.is_float else mp.workprec(self.bits)

    def convert(self, value: Any) -> Number:
        if self.is_float:
            return float(value)
        if isinstance(value, ProjectivePoint):
            return value.to_mpf(self.bits)
        return mp.mpf(value)

    def is_infinite(self, z: Number) -> bool:
        return z == self.ninf or z == self.pinf

    # Branch selection ---------------------------------------------------------
    def in_rosen_interval(self, x: Number) -> bool:
        return -self.half_lam <= x < self.half_lam

    def in_mediant_interval(self, x: Number) -> bool:
        return -self.half_lam <= x < self.two_over_lam

    def mediant_symbol(self, x: Number) -> MediantSymbol:
        if x < -self.cut:
            return MediantSymbol.UMINUS
        if x < 0:
            return MediantSymbol.VMINUS
        if x == 0:
            return MediantSymbol.IDENT
        if x <= self.cut:
            return MediantSymbol.VPLUS
        return MediantSymbol.UPLUS

    def rosen_digit(self, x: Number) -> Digit:
        ax = abs(x)
        return Digit(1 if x > 0 else -1, int(1 / (self.lam * ax) + self.convert(0.5)))

    # Maps ---------------------------------------------------------------------
    def mobius(self, matrix: Tuple[Number, Number, Number, Number], z: Number) -> Number:
        a, b, c, d = matrix
        if self.is_infinite(z):
            return a / c if c else self.ninf
        den = c * z + d
        if den == 0:
            return self.ninf
        return (a * z + b) / den

    def act(self, symbol: MediantSymbol, z: Number) -> Number:
        return self.mobius(self.inverse[symbol], z)

    def rosen_act(self, digit: Digit, z: Number) -> Number:
        shift = self.lam * digit.r
        if self.is_infinite(z):
            return -shift
        if z == 0:
            return self.ninf
        return digit.eps / z - shift

    def derivative(self, symbol: MediantSymbol, x: Number) -> Number:
        _, _, c, d = self.inverse[symbol]
        den = c * x + d
        return 1 / (den * den)

    # Distances to branch cuts -------------------------------------------------
    def mediant_margin(self, x: Number) -> Number:
        return min(abs(x + self.cut), abs(x), abs(x - self.cut))

    def rosen_margin(self, x: Number, r: int) -> Number:
        ax = abs(x)
        margin = ax - 2 / ((2 * r + 1) * self.lam)
        if r > 1:
            margin = min(margin, 2 / ((2 * r - 1) * self.lam) - ax)
        return margin


# ---------------------------------------------------------------------------
# Single steps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RosenStep:
    value: Point
    digit: Optional[Digit]
    near_boundary: bool = False

    @property
    def terminal(self) -> bool:
        return self.digit is None


@dataclass(frozen=True)
class MediantStep:
    value: Point
    symbol: MediantSymbol
    near_boundary: bool = False


def rosen_step(ctx: HeckeContext, x: Point, kernel: Optional[OrbitKernel] = None) -> RosenStep:
    if isinstance(x, ProjectivePoint):
        image, eps, r = exact_rosen_step(ctx.ring, x)
        return RosenStep(image, None if eps == 0 else Digit(eps, r))

    kernel = kernel or OrbitKernel(ctx)
    with kernel.precision():
        z = kernel.convert(x)
        if not kernel.in_rosen_interval(z):
            raise OutOfIntervalError(f"x={x} outside [-lambda/2, lambda/2)")
        if z == 0:
            return RosenStep(kernel.zero, None)
        digit = kernel.rosen_digit(z)
        near = kernel.rosen_margin(z, digit.r) <= BOUNDARY_MARGIN_FACTOR * kernel.unit
        if near:
            logger.debug("[rosen-mediant] x=%s within tolerance of a T branch cut", x)
        return RosenStep(kernel.rosen_act(digit, z), digit, near)


def mediant_step(ctx: HeckeContext, x: Point, kernel: Optional[OrbitKernel] = None) -> MediantStep:
    if isinstance(x, ProjectivePoint):
        symbol = exact_mediant_symbol(ctx.ring, x)
        return MediantStep(exact_mediant_act(ctx.ring, symbol, x), symbol)

    kernel = kernel or OrbitKernel(ctx)
    with kernel.precision():
        z = kernel.convert(x)
        if not kernel.in_mediant_interval(z):
            raise OutOfIntervalError(f"x={x} outside [-lambda/2, 2/lambda)")
        symbol = kernel.mediant_symbol(z)
        near = symbol is not MediantSymbol.IDENT and (
            kernel.mediant_margin(z) <= BOUNDARY_MARGIN_FACTOR * kernel.unit
        )
        return MediantStep(kernel.act(symbol, z), symbol, near)


# ---------------------------------------------------------------------------
# Exact branches
# ---------------------------------------------------------------------------

def exact_mediant_symbol(ring: LambdaRing, x: ProjectivePoint) -> MediantSymbol:
    """Branch of S at x = a/b (b > 0), decided by signs in Z[lambda]."""

    a, b, lam = x.num, x.den, ring.lam
    if x.is_infinite() or zl_sign(a * 2 + lam * b) < 0 or zl_sign(b * 2 - lam * a) <= 0:
        raise OutOfIntervalError("x must lie in [-lambda/2, 2/lambda)")
    if zl_sign(lam * a * 3 + b * 2) < 0:
        return MediantSymbol.UMINUS
    sign_a = zl_sign(a)
    if sign_a < 0:
        return MediantSymbol.VMINUS
    if sign_a == 0:
        return MediantSymbol.IDENT
    if zl_sign(lam * a * 3 - b * 2) <= 0:
        return MediantSymbol.VPLUS
    return MediantSymbol.UPLUS


def exact_mediant_act(ring: LambdaRing, symbol: MediantSymbol, point: ProjectivePoint) -> ProjectivePoint:
    return inverse_symbol_matrix(ring, symbol).apply(point)


def symbol_matrix(ring: LambdaRing, symbol: MediantSymbol) -> MobiusZL:
    if symbol is MediantSymbol.IDENT:
        return ring.identity()
    return ring.generators[symbol.value]


@lru_cache(maxsize=None)
def inverse_symbol_matrix(ring: LambdaRing, symbol: MediantSymbol) -> MobiusZL:
    return symbol_matrix(ring, symbol).inverse()


def rosen_digit_matrix(ring: LambdaRing, digit: Digit) -> MobiusZL:
    """[[0, eps], [1, r lambda]], the convergent matrix of one Rosen digit."""

    return MobiusZL(ring.zero, ring.from_int(digit.eps), ring.one, ring.lam * digit.r)


# ---------------------------------------------------------------------------
# Expansions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DigitString:
    digits: Tuple[Digit, ...]
    terminated: bool = False
    ambiguous: bool = False
    precision_bits: int = 0

    def __len__(self) -> int:
        return len(self.digits)

    def __iter__(self) -> Iterator[Digit]:
        return iter(self.digits)

    def __getitem__(self, index: int) -> Digit:
        return self.digits[index]

    def __str__(self) -> str:
        return "".join(str(d) for d in self.digits)

    def to_mapping(self) -> Dict[str, Any]:
        return {
            "digits": str(self),
            "length": len(self.digits),
            "terminated": self.terminated,
            "ambiguous": self.ambiguous,
            "precision_bits": self.precision_bits,
        }


@dataclass(frozen=True)
class SymbolString:
    symbols: Tuple[MediantSymbol, ...]
    terminated: bool = False
    ambiguous: bool = False
    precision_bits: int = 0

    @property
    def u_positions(self) -> Tuple[int, ...]:
        """1-based indices k_m of the U-symbols."""

        return tuple(i for i, s in enumerate(self.symbols, 1) if s.is_u)

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self) -> Iterator[MediantSymbol]:
        return iter(self.symbols)

    def __getitem__(self, index: int) -> MediantSymbol:
        return self.symbols[index]

    def __str__(self) -> str:
        return " ".join(s.value for s in self.symbols)

    def to_mapping(self) -> Dict[str, Any]:
        return {
            "symbols": str(self),
            "length": len(self.symbols),
            "u_positions": list(self.u_positions),
            "terminated": self.terminated,
            "ambiguous": self.ambiguous,
            "precision_bits": self.precision_bits,
        }


@dataclass
class _TrackedRun:
    items: List[Any] = field(default_factory=list)
    terminated: bool = False
    ambiguous: bool = False
    bits: int = 0


def expand(
    ctx: HeckeContext,
    x: Point,
    n: int,
    *,
    margin_factor: int = BOUNDARY_MARGIN_FACTOR,
    max_bits: int = MAX_PRECISION_BITS,
) -> DigitString:
    if isinstance(x, ProjectivePoint):
        digits: List[Digit] = []
        point = x
        for _ in range(n):
            point, eps, r = exact_rosen_step(ctx.ring, point)
            if eps == 0:
                return DigitString(tuple(digits), terminated=True)
            digits.append(Digit(eps, r))
        return DigitString(tuple(digits), terminated=point.is_zero())
    run = _tracked(ctx, x, n, "rosen", margin_factor, max_bits)
    return DigitString(tuple(run.items), run.terminated, run.ambiguous, run.bits)


def symbol_expand(
    ctx: HeckeContext,
    x: Point,
    n: int,
    *,
    margin_factor: int = BOUNDARY_MARGIN_FACTOR,
    max_bits: int = MAX_PRECISION_BITS,
) -> SymbolString:
    if isinstance(x, ProjectivePoint):
        symbols: List[MediantSymbol] = []
        point = x
        for _ in range(n):
            symbol = exact_mediant_symbol(ctx.ring, point)
            if symbol is MediantSymbol.IDENT:
                return SymbolString(tuple(symbols), terminated=True)
            point = exact_mediant_act(ctx.ring, symbol, point)
            symbols.append(symbol)
        return SymbolString(tuple(symbols), terminated=point.is_zero())
    run = _tracked(ctx, x, n, "mediant", margin_factor, max_bits)
    return SymbolString(tuple(run.items), run.terminated, run.ambiguous, run.bits)


def _tracked(ctx: HeckeContext, x: Number, n: int, mode: str, factor: int, max_bits: int) -> _TrackedRun:
    bits = ctx.precision_bits
    while True:
        run = _tracked_attempt(OrbitKernel(ctx, bits), x, n, mode, factor)
        if not run.ambiguous:
            return run
        if bits >= max_bits:
            logger.warning(
                "[rosen-mediant] branch still ambiguous at %d bits after %d steps (x=%s)",
                bits,
                len(run.items),
                x,
            )
            return run
        bits = min(2 * bits, max_bits)
        logger.debug("[rosen-mediant] escalating orbit precision to %d bits", bits)


def _tracked_attempt(kernel: OrbitKernel, x: Number, n: int, mode: str, factor: int) -> _TrackedRun:
    run = _TrackedRun(bits=kernel.bits)
    with kernel.precision():
        z = kernel.convert(x)
        inside = kernel.in_rosen_interval(z) if mode == "rosen" else kernel.in_mediant_interval(z)
        if not inside:
            raise OutOfIntervalError(f"x={x} outside the interval of the {mode} map")
        err = abs(z) * kernel.unit
        for _ in range(n):
            if z == 0:
                run.terminated = True
                return run
            if mode == "rosen":
                digit = kernel.rosen_digit(z)
                if kernel.rosen_margin(z, digit.r) <= factor * err:
                    run.ambiguous = True
                    return run
                deriv = 1 / (z * z)
                z = kernel.rosen_act(digit, z)
                run.items.append(digit)
            else:
                symbol = kernel.mediant_symbol(z)
                if kernel.mediant_margin(z) <= factor * err:
                    run.ambiguous = True
                    return run
                deriv = kernel.derivative(symbol, z)
                z = kernel.act(symbol, z)
                run.items.append(symbol)
            err = err * deriv + 4 * abs(z) * kernel.unit
        run.terminated = z == 0
    return run


@dataclass(frozen=True)
class InducedLength:
    length: int
    verified: bool
    matches_digit: bool
    difference: Any


def induced_length(ctx: HeckeContext, x: Point, kernel: Optional[OrbitKernel] = None) -> InducedLength:
    """Number of V-steps of S before its first U-step, with S^(l+1)(x) compared to T(x)."""

    if isinstance(x, ProjectivePoint):
        target = rosen_step(ctx, x)
        if target.terminal:
            raise TerminalOrbitError("x = 0 has no induced length")
        point, length = x, 0
        while True:
            symbol = exact_mediant_symbol(ctx.ring, point)
            if symbol is MediantSymbol.IDENT:
                raise TerminalOrbitError("orbit reached 0 before a U-step")
            point = exact_mediant_act(ctx.ring, symbol, point)
            if symbol.is_u:
                break
            length += 1
        same = point == target.value
        return InducedLength(length, same, length + 1 == target.digit.r, 0 if same else None)

    kernel = kernel or OrbitKernel(ctx)
    with kernel.precision():
        z = kernel.convert(x)
        target = rosen_step(ctx, z, kernel)
        if target.terminal:
            raise TerminalOrbitError("x = 0 has no induced length")
        length = 0
        while True:
            symbol = kernel.mediant_symbol(z)
            if symbol is MediantSymbol.IDENT:
                raise TerminalOrbitError("orbit reached 0 before a U-step")
            z = kernel.act(symbol, z)
            if symbol.is_u:
                break
            length += 1
        difference = abs(z - target.value)
        tolerance = 1e-12 if kernel.is_float else mp.ldexp(1, -(kernel.bits // 2))
        return InducedLength(length, difference < tolerance, length + 1 == target.digit.r, difference)


# ---------------------------------------------------------------------------
# Convergents
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvergentState:
    """(p_{n-1}, p_n, q_{n-1}, q_n) with a decimal mirror of p_n/q_n."""

    n: int
    p_prev: ZLambda
    p_cur: ZLambda
    q_prev: ZLambda
    q_cur: ZLambda
    value: Any
    error_bound: Any

    @property
    def fraction(self) -> ProjectivePoint:
        return ProjectivePoint(self.p_cur, self.q_cur)

    def to_mapping(self, digits: int = 30) -> Dict[str, Any]:
        return {
            "n": self.n,
            "p": self.p_cur.to_json(),
            "q": self.q_cur.to_json(),
            "value": format_real(self.value, digits),
            "error_bound": format_real(self.error_bound, 5),
        }


def convergents(ctx: HeckeContext, digits: Sequence[Digit]) -> List[ConvergentState]:
    ring = ctx.ring
    lam = ring.lam
    p_prev, p_cur = ring.one, ring.zero
    q_prev, q_cur = ring.zero, ring.one
    states = [_convergent_state(ctx, 0, p_prev, p_cur, q_prev, q_cur)]
    for n, digit in enumerate(digits, 1):
        p_next = lam * p_cur * digit.r + p_prev * digit.eps
        q_next = lam * q_cur * digit.r + q_prev * digit.eps
        det = p_cur * q_next - q_cur * p_next
        if not (det == 1 or det == -1):
            raise ArithmeticInvariantError(f"|p_(n-1) q_n - q_(n-1) p_n| != 1 at n={n}")
        if zl_sign(q_next) <= 0:
            raise ArithmeticInvariantError(f"q_{n} is not positive; digit string is not admissible")
        p_prev, p_cur, q_prev, q_cur = p_cur, p_next, q_cur, q_next
        states.append(_convergent_state(ctx, n, p_prev, p_cur, q_prev, q_cur))
    return states


def _convergent_state(
    ctx: HeckeContext, n: int, p_prev: ZLambda, p_cur: ZLambda, q_prev: ZLambda, q_cur: ZLambda
) -> ConvergentState:
    bits = ctx.precision_bits
    with mp.workprec(bits + 16):
        p_enc, q_enc = zl_eval(p_cur, bits), zl_eval(q_cur, bits)
        q_mid = q_enc.midpoint
        value = p_enc.midpoint / q_mid
        bound = (p_enc.width + abs(value) * q_enc.width) / abs(q_mid)
    return ConvergentState(n, p_prev, p_cur, q_prev, q_cur, value, bound)


@dataclass(frozen=True)
class MediantConvergent:
    """One entry of the interleaved principal / mediant list."""

    index: int
    kind: str
    u: ZLambda
    v: ZLambda
    level: int
    offset: int
    value: Any

    @property
    def fraction(self) -> ProjectivePoint:
        return ProjectivePoint(self.u, self.v)

    def to_mapping(self, digits: int = 30) -> Dict[str, Any]:
        return {
            "index": self.index,
            "kind": self.kind,
            "level": self.level,
            "offset": self.offset,
            "u": self.u.to_json(),
            "v": self.v.to_json(),
            "value": format_real(self.value, digits),
        }


def _products(ctx: HeckeContext, x: Point, depth: int) -> Iterator[Tuple[int, MediantSymbol, MobiusZL]]:
    symbols = symbol_expand(ctx, x, depth)
    product = ctx.ring.identity()
    for i, symbol in enumerate(symbols, 1):
        product = product @ symbol_matrix(ctx.ring, symbol)
        yield i, symbol, product


def _column(a: ZLambda, c: ZLambda) -> Tuple[ZLambda, ZLambda]:
    return (-a, -c) if zl_sign(c) < 0 else (a, c)


def mediant_convergents(ctx: HeckeContext, x: Point, depth: int) -> List[MediantConvergent]:
    """Mediants u_{m,l}/v_{m,l} interleaved with the principal convergents p_m/q_m.

    At a V-time i the entry is M_1...M_i(infinity); at the m-th U-time it is
    the newly completed p_m/q_m (second column of M_1...M_{k_m}).
    """

    if depth < 1:
        raise ValueError("depth must be at least 1")
    bits = ctx.precision_bits
    entries: List[MediantConvergent] = []
    level, offset = 0, 0
    for i, symbol, product in _products(ctx, x, depth):
        if symbol.is_u:
            level += 1
            offset = 0
            u, v = _column(product.b, product.d)
            kind = "principal"
        else:
            offset += 1
            u, v = _column(product.a, product.c)
            kind = "mediant"
        value = ProjectivePoint(u, v).to_mpf(bits)
        entries.append(MediantConvergent(i, kind, u, v, level, offset, value))
    return entries


def orbit_fractions(ctx: HeckeContext, x: Point, depth: int) -> List[Tuple[MediantSymbol, ZLambda, ZLambda]]:
    """M_1...M_i(infinity) for i = 1..depth, the fractions whose Theta is 1/(x_i - y_i)."""

    return [(symbol, *_column(product.a, product.c)) for _, symbol, product in _products(ctx, x, depth)]


# ---------------------------------------------------------------------------
# Approximation coefficients
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThetaSeries:
    values: Tuple[Any, ...]
    symbols: Tuple[MediantSymbol, ...]
    terminated: bool
    precision_bits: int

    def __len__(self) -> int:
        return len(self.values)

    def to_mapping(self, digits: int = 30) -> Dict[str, Any]:
        return {
            "theta": [format_real(v, digits) for v in self.values],
            "symbols": [s.value for s in self.symbols],
            "terminated": self.terminated,
            "precision_bits": self.precision_bits,
        }


def theta_direct(ctx: HeckeContext, x: Point, a: ZLambda, c: ZLambda) -> Any:
    """c^2 |x - a/c| evaluated as |c| |c x - a|."""

    if zl_sign(c) <= 0:
        raise ValueError("denominator c must be positive")
    bits = ctx.precision_bits
    if isinstance(x, ProjectivePoint):
        exact = c * x.num - a * x.den
        with mp.workprec(bits + 16):
            return abs(c.to_mpf(bits)) * abs(exact.to_mpf(bits)) / x.den.to_mpf(bits)
    with mp.workprec(bits + 16):
        cv = c.to_mpf(bits)
        return abs(cv) * abs(cv * mp.mpf(x) - a.to_mpf(bits))


def theta_orbit(ctx: HeckeContext, x: Point, n: int) -> ThetaSeries:
    """Theta_i = 1/(x_i - y_i) along (x_i, y_i) = S_hat^i(x, infinity)."""

    if n < 1:
        raise ValueError("n must be at least 1")
    symbols = symbol_expand(ctx, x, n)
    kernel = OrbitKernel(ctx, max(ctx.precision_bits, symbols.precision_bits))
    values: List[Any] = []
    with kernel.precision():
        xi = kernel.convert(x)
        yi = kernel.ninf
        for symbol in symbols:
            xi = kernel.act(symbol, xi)
            yi = kernel.act(symbol, yi)
            values.append(kernel.zero if kernel.is_infinite(yi) else 1 / (xi - yi))
    return ThetaSeries(tuple(values), tuple(symbols), symbols.terminated, kernel.bits)


def rosen_theta_pair(t: Number, v: Number) -> Tuple[Number, Number]:
    """(theta_{n-1}, theta_n) from the coordinates (t_n, v_n) of the explicit natural extension."""

    den = 1 + t * v
    return v / den, abs(t) / den
