"""Exact arithmetic in Z[lambda_k] with lambda_k = 2cos(pi/k).

Elements are integer coefficient vectors reduced modulo the minimal
polynomial of lambda_k, so equality is coefficient-wise. Signs are decided by
rigorous interval evaluation with precision doubling; the zero vector is the
only element whose sign is 0.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Any, Dict, Iterable, List, Sequence, Tuple, Union

import sympy
from mpmath import mp

from .errors import ArithmeticInvariantError, ContextMismatchError, LiteralParseError

logger = logging.getLogger(__name__)

IntLike = Union[int, "ZLambda"]

_SIGN_START_BITS = 128
_LAMBDA_SYMBOL = sympy.Symbol("l")


# ---------------------------------------------------------------------------
# Minimal polynomial
# ---------------------------------------------------------------------------

def lambda_minimal_polynomial(k: int) -> Tuple[int, ...]:
    """Integer coefficients (constant term first) of the minimal polynomial of 2cos(pi/k).

    Built from the cyclotomic polynomial Phi_{2k}: with t = x + 1/x and
    d = phi(2k)/2 one has x^d psi(t) = Phi_{2k}(x).
    """

    x, t = sympy.symbols("x t")
    cyclo = sympy.Poly(sympy.cyclotomic_poly(2 * k, x), x)
    degree = cyclo.degree() // 2
    coeffs = cyclo.all_coeffs()[::-1]

    # x^i + x^-i as a polynomial in t
    dickson = [sympy.Poly(2, t), sympy.Poly(t, t)]
    for _ in range(2, degree + 1):
        dickson.append(dickson[-1] * sympy.Poly(t, t) - dickson[-2])

    psi = sympy.Poly(coeffs[degree], t)
    for i in range(1, degree + 1):
        psi = psi + dickson[i] * int(coeffs[degree + i])

    if psi.degree() != degree or not psi.is_irreducible:
        raise ArithmeticInvariantError(f"minimal polynomial construction failed for k={k}")
    return tuple(int(c) for c in reversed(psi.all_coeffs()))


# ---------------------------------------------------------------------------
# Ring and elements
# ---------------------------------------------------------------------------

class LambdaRing:
    """The ring Z[lambda_k]; one shared instance per index k."""

    def __init__(self, k: int, min_poly: Sequence[int]) -> None:
        if min_poly[-1] != 1:
            raise ArithmeticInvariantError("minimal polynomial must be monic")
        self.k = k
        self.min_poly = tuple(int(c) for c in min_poly)
        self.degree = len(self.min_poly) - 1
        self._lambda_cache: Dict[int, Any] = {}
        self._generators: Dict[str, "MobiusZL"] = {}

    @classmethod
    def for_index(cls, k: int) -> "LambdaRing":
        return _ring_for_index(k)

    # Public API -----------------------------------------------------------
    def element(self, coeffs: Iterable[int]) -> "ZLambda":
        return ZLambda(self, self.reduce(coeffs))

    def from_int(self, n: int) -> "ZLambda":
        return self.element([n])

    @property
    def zero(self) -> "ZLambda":
        return self.from_int(0)

    @property
    def one(self) -> "ZLambda":
        return self.from_int(1)

    @property
    def lam(self) -> "ZLambda":
        return self.element([0, 1])

    def reduce(self, coeffs: Iterable[int]) -> Tuple[int, ...]:
        work = [int(c) for c in coeffs]
        d = self.degree
        low = self.min_poly[:-1]
        for power in range(len(work) - 1, d - 1, -1):
            top = work[power]
            if top:
                work[power] = 0
                base = power - d
                for i, m in enumerate(low):
                    if m:
                        work[base + i] -= top * m
        work = work[:d]
        if len(work) < d:
            work.extend([0] * (d - len(work)))
        return tuple(work)

    def lambda_at(self, bits: int) -> Any:
        """lambda_k as an mpf carrying ``bits`` (+ guard) bits."""

        cached = self._lambda_cache.get(bits)
        if cached is None:
            with mp.workprec(bits + 16):
                cached = 2 * mp.cos(mp.pi / self.k)
            self._lambda_cache[bits] = cached
        return cached

    @property
    def generators(self) -> Dict[str, "MobiusZL"]:
        """The matrices U-, U+, V-, V+ of the mediant map."""

        if not self._generators:
            zero, one, lam = self.zero, self.one, self.lam
            self._generators = {
                "U-": MobiusZL(zero, -one, one, lam),
                "U+": MobiusZL(zero, one, one, lam),
                "V-": MobiusZL(-one, zero, lam, one),
                "V+": MobiusZL(one, zero, lam, one),
            }
        return self._generators

    def identity(self) -> "MobiusZL":
        return MobiusZL(self.one, self.zero, self.zero, self.one)

    def __repr__(self) -> str:
        return f"LambdaRing(k={self.k}, min_poly={self.min_poly})"


@lru_cache(maxsize=None)
def _ring_for_index(k: int) -> LambdaRing:
    return LambdaRing(k, lambda_minimal_polynomial(k))


class ZLambda:
    """Immutable element c_0 + c_1 lambda + ... + c_{d-1} lambda^{d-1}."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: LambdaRing, coeffs: Tuple[int, ...]) -> None:
        self.ring = ring
        self.coeffs = coeffs

    # Arithmetic -----------------------------------------------------------
    def _coerce(self, other: IntLike) -> "ZLambda":
        if isinstance(other, ZLambda):
            if other.ring is not self.ring and other.ring.k != self.ring.k:
                raise ContextMismatchError(
                    f"cannot combine elements of Z[lambda_{self.ring.k}] and Z[lambda_{other.ring.k}]"
                )
            return other
        if isinstance(other, int):
            return self.ring.from_int(other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: IntLike) -> "ZLambda":
        rhs = self._coerce(other)
        if rhs is NotImplemented:
            return NotImplemented
        return ZLambda(self.ring, tuple(a + b for a, b in zip(self.coeffs, rhs.coeffs)))

    __radd__ = __add__

    def __neg__(self) -> "ZLambda":
        return ZLambda(self.ring, tuple(-a for a in self.coeffs))

    def __sub__(self, other: IntLike) -> "ZLambda":
        rhs = self._coerce(other)
        if rhs is NotImplemented:
            return NotImplemented
        return ZLambda(self.ring, tuple(a - b for a, b in zip(self.coeffs, rhs.coeffs)))

    def __rsub__(self, other: IntLike) -> "ZLambda":
        return (-self) + other

    def __mul__(self, other: IntLike) -> "ZLambda":
        if isinstance(other, int):
            return ZLambda(self.ring, tuple(a * other for a in self.coeffs))
        rhs = self._coerce(other)
        if rhs is NotImplemented:
            return NotImplemented
        product = [0] * (2 * self.ring.degree - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(rhs.coeffs):
                    if b:
                        product[i + j] += a * b
        return ZLambda(self.ring, self.ring.reduce(product))

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = self.ring.from_int(other)
        if not isinstance(other, ZLambda):
            return NotImplemented
        return self.ring.k == other.ring.k and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.ring.k, self.coeffs))

    # Queries --------------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def sign(self) -> int:
        return zl_sign(self)

    def to_mpf(self, bits: int = 256) -> Any:
        with mp.workprec(bits + 8):
            return zl_eval(self, bits).midpoint

    def to_json(self) -> List[str]:
        return [str(c) for c in self.coeffs]

    def __repr__(self) -> str:
        terms = []
        for power, c in enumerate(self.coeffs):
            if not c:
                continue
            if power == 0:
                terms.append(str(c))
            elif power == 1:
                terms.append(f"{c}*l")
            else:
                terms.append(f"{c}*l^{power}")
        return f"ZLambda({' + '.join(terms) or '0'}; k={self.ring.k})"


def zl_from_int(ring: LambdaRing, n: int) -> ZLambda:
    return ring.from_int(n)


def zl_lambda(ring: LambdaRing) -> ZLambda:
    return ring.lam


def zl_add(a: ZLambda, b: ZLambda) -> ZLambda:
    return a + b


def zl_mul(a: ZLambda, b: ZLambda) -> ZLambda:
    return a * b


def zl_neg(a: ZLambda) -> ZLambda:
    return -a


# ---------------------------------------------------------------------------
# Interval evaluation and signs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Enclosure:
    """Closed interval [lo, hi] known to contain a real value."""

    lo: Any
    hi: Any

    @property
    def width(self) -> Any:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Any:
        return (self.lo + self.hi) / 2

    def contains(self, value: Any) -> bool:
        return self.lo <= value <= self.hi

    def excludes_zero(self) -> bool:
        return self.lo > 0 or self.hi < 0


def zl_eval(x: ZLambda, precision_bits: int) -> Enclosure:
    """Rigorous enclosure of ``x`` of width below 2^(-precision_bits/2)."""

    if precision_bits < 64:
        raise ValueError("precision_bits must be at least 64")
    coeffs = x.coeffs
    if not any(coeffs[1:]):
        # integers convert exactly once the working precision covers them
        with mp.workprec(max(precision_bits, abs(coeffs[0]).bit_length() + 1)):
            value = mp.mpf(coeffs[0])
        return Enclosure(value, value)

    d = x.ring.degree
    magnitude = sum(abs(c) for c in coeffs)
    work = precision_bits + magnitude.bit_length() + d + 16
    with mp.workprec(work):
        lam = x.ring.lambda_at(work)
        value = mp.mpf(0)
        for c in reversed(coeffs):
            value = value * lam + c
        # Horner rounding plus the error of lambda itself, with |lambda| < 2
        radius = mp.ldexp(mp.mpf(magnitude * (d + 2)), d + 4 - work)
        return Enclosure(value - radius, value + radius)


def zl_sign(x: ZLambda) -> int:
    if x.is_zero():
        return 0
    bits = _SIGN_START_BITS
    while True:
        enclosure = zl_eval(x, bits)
        if enclosure.lo > 0:
            return 1
        if enclosure.hi < 0:
            return -1
        bits *= 2
        logger.debug("[rosen-mediant] sign of %r undecided, retrying at %d bits", x, bits)


# ---------------------------------------------------------------------------
# Projective points and Mobius matrices
# ---------------------------------------------------------------------------

class ProjectivePoint:
    """A point (num : den) of the projective line over Q(lambda).

    The representative is normalized so that ``den`` is positive, or
    ``den`` is zero and ``num`` positive (the point at infinity).
    """

    __slots__ = ("num", "den")

    def __init__(self, num: ZLambda, den: ZLambda) -> None:
        if num.is_zero() and den.is_zero():
            raise ArithmeticInvariantError("(0 : 0) is not a projective point")
        flip = zl_sign(den) < 0 if not den.is_zero() else zl_sign(num) < 0
        self.num = -num if flip else num
        self.den = -den if flip else den

    @classmethod
    def infinity(cls, ring: LambdaRing) -> "ProjectivePoint":
        return cls(ring.one, ring.zero)

    @classmethod
    def of(cls, ring: LambdaRing, num: IntLike, den: IntLike = 1) -> "ProjectivePoint":
        def as_zl(value: IntLike) -> ZLambda:
            return value if isinstance(value, ZLambda) else ring.from_int(value)

        return cls(as_zl(num), as_zl(den))

    @property
    def ring(self) -> LambdaRing:
        return self.num.ring

    def is_infinite(self) -> bool:
        return self.den.is_zero()

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def sign(self) -> int:
        return zl_sign(self.num)

    def compare(self, other: "ProjectivePoint") -> int:
        """Sign of self - other for finite points."""

        return zl_sign(self.num * other.den - other.num * self.den)

    def __sub__(self, other: "ProjectivePoint") -> "ProjectivePoint":
        return ProjectivePoint(self.num * other.den - other.num * self.den, self.den * other.den)

    def __add__(self, other: "ProjectivePoint") -> "ProjectivePoint":
        return ProjectivePoint(self.num * other.den + other.num * self.den, self.den * other.den)

    def __neg__(self) -> "ProjectivePoint":
        return ProjectivePoint(-self.num, self.den)

    def reciprocal(self) -> "ProjectivePoint":
        return ProjectivePoint(self.den, self.num)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ProjectivePoint):
            return NotImplemented
        return (self.num * other.den - other.num * self.den).is_zero()

    __hash__ = None  # type: ignore[assignment]

    def key(self) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        """Hashable key; canonical for primitive columns of G_k matrices."""

        return (self.num.coeffs, self.den.coeffs)

    def to_mpf(self, bits: int = 256) -> Any:
        if self.is_infinite():
            return mp.inf
        with mp.workprec(bits + 8):
            return zl_eval(self.num, bits).midpoint / zl_eval(self.den, bits).midpoint

    def to_json(self) -> Dict[str, List[str]]:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    def __repr__(self) -> str:
        return f"ProjectivePoint({self.num!r} : {self.den!r})"


@dataclass(frozen=True)
class MobiusZL:
    """2x2 matrix [[a, b], [c, d]] over Z[lambda] acting by z -> (az + b)/(cz + d)."""

    a: ZLambda
    b: ZLambda
    c: ZLambda
    d: ZLambda

    def __matmul__(self, other: "MobiusZL") -> "MobiusZL":
        return MobiusZL(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def det(self) -> ZLambda:
        return self.a * self.d - self.b * self.c

    def determinant_sign(self) -> int:
        det = self.det()
        if det == 1:
            return 1
        if det == -1:
            return -1
        raise ArithmeticInvariantError(f"determinant {det!r} is not a unit +-1")

    def inverse(self) -> "MobiusZL":
        s = self.determinant_sign()
        return MobiusZL(self.d * s, -self.b * s, -self.c * s, self.a * s)

    def power(self, n: int) -> "MobiusZL":
        base = self if n >= 0 else self.inverse()
        result = MobiusZL(self.a.ring.one, self.a.ring.zero, self.a.ring.zero, self.a.ring.one)
        for _ in range(abs(n)):
            result = result @ base
        return result

    def apply(self, point: ProjectivePoint) -> ProjectivePoint:
        return mobius_apply(self, point)

    def at_infinity(self) -> ProjectivePoint:
        return ProjectivePoint(self.a, self.c)

    def entries(self) -> Tuple[ZLambda, ZLambda, ZLambda, ZLambda]:
        return (self.a, self.b, self.c, self.d)

    def to_json(self) -> List[List[List[str]]]:
        return [[self.a.to_json(), self.b.to_json()], [self.c.to_json(), self.d.to_json()]]


def mobius_apply(m: MobiusZL, point: ProjectivePoint) -> ProjectivePoint:
    return ProjectivePoint(m.a * point.num + m.b * point.den, m.c * point.num + m.d * point.den)


# ---------------------------------------------------------------------------
# Exact literals
# ---------------------------------------------------------------------------

def parse_exact_literal(ring: LambdaRing, text: str) -> ProjectivePoint:
    """Parse a rational expression in lambda such as ``(1-l)/2`` or ``-lambda/2``."""

    cleaned = text.strip().replace("lambda", "l").replace("λ", "l").replace("^", "**")
    if not cleaned:
        raise LiteralParseError("empty literal")
    try:
        expr = sympy.sympify(cleaned, locals={"l": _LAMBDA_SYMBOL}, rational=True)
    except (sympy.SympifyError, SyntaxError, TypeError) as exc:
        raise LiteralParseError(f"cannot parse {text!r}: {exc}") from exc
    if not isinstance(expr, sympy.Expr) or expr.free_symbols - {_LAMBDA_SYMBOL}:
        raise LiteralParseError(f"{text!r} is not a rational expression in lambda")

    num, den = sympy.fraction(sympy.together(expr))
    try:
        num_poly = sympy.Poly(num, _LAMBDA_SYMBOL, domain="QQ")
        den_poly = sympy.Poly(den, _LAMBDA_SYMBOL, domain="QQ")
    except sympy.PolynomialError as exc:
        raise LiteralParseError(f"{text!r} is not a rational expression in lambda") from exc

    scale = 1
    for c in num_poly.all_coeffs() + den_poly.all_coeffs():
        q = int(sympy.Rational(c).q)
        scale = scale * q // gcd(scale, q)
    num_vec = [int(sympy.Rational(c) * scale) for c in reversed(num_poly.all_coeffs())]
    den_vec = [int(sympy.Rational(c) * scale) for c in reversed(den_poly.all_coeffs())]
    den_zl = ring.element(den_vec)
    if den_zl.is_zero():
        raise LiteralParseError(f"{text!r} has a vanishing denominator")
    return ProjectivePoint(ring.element(num_vec), den_zl)


def is_exact_literal(text: str) -> bool:
    """Whether a CLI value should go through the exact path."""

    lowered = text.strip().lower()
    return "l" in lowered or "λ" in lowered or "/" in lowered
