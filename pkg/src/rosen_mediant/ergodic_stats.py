"""Large-N orbit statistics for the mediant and Rosen maps.

The mediant map has an infinite invariant measure, so every statistic along
its orbits is reported as a ratio: counts are normalized by the number of
Rosen steps (U-symbols) seen on the same orbit.  The hot loops run on plain
floats and take only picklable arguments, so independent orbits can be
farmed out to a process pool and merged afterwards.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import reduce
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from mpmath import mp

from .algebraic_ring import ProjectivePoint, ZLambda, zl_eval, zl_sign
from .errors import InsufficientLinearRegionError, OutOfIntervalError
from .hecke_context import HeckeContext, closed_form_constants, format_real
from .planar_extension import WitnessOrbit, build_domains, domain_measure, witness_orbit
from .rosen_maps import (
    OrbitKernel,
    convergents,
    expand,
    mediant_convergents,
    orbit_fractions,
    theta_direct,
    theta_orbit,
)

logger = logging.getLogger(__name__)

MIN_BREAKPOINT_ITER = 100_000
PLATEAU_BAND = 0.01


def orbit_rng(seed: int, orbit_id: int) -> np.random.Generator:
    """Counter-based stream keyed by (seed, orbit_id); independent of scheduling."""

    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, orbit_id])))


# ---------------------------------------------------------------------------
# Float orbit kernels (picklable, pool-friendly)
# ---------------------------------------------------------------------------

def _mediant_thetas(lam: float, x: float, n: int) -> Tuple[np.ndarray, np.ndarray, bool]:
    """Theta_i = 1/(x_i - y_i) along S_hat^i(x, infinity), with the U-time mask."""

    cut = 2.0 / (3.0 * lam)
    thetas = np.empty(n)
    is_u = np.zeros(n, dtype=bool)
    y = None
    for i in range(n):
        if x < -cut:
            x = -1.0 / x - lam
            y = -lam if y is None else -1.0 / y - lam
            is_u[i] = True
        elif x < 0.0:
            x = -x / (lam * x + 1.0)
            y = -1.0 / lam if y is None else -y / (lam * y + 1.0)
        elif x == 0.0:
            return thetas[:i], is_u[:i], True
        elif x <= cut:
            x = x / (1.0 - lam * x)
            y = -1.0 / lam if y is None else y / (1.0 - lam * y)
        else:
            x = 1.0 / x - lam
            y = -lam if y is None else 1.0 / y - lam
            is_u[i] = True
        thetas[i] = 1.0 / (x - y)
    return thetas, is_u, False


def _rosen_orbit(lam: float, x: float, n: int) -> Tuple[np.ndarray, np.ndarray, bool]:
    """theta_(i-1) = 1/(x_i - y_i) along T_hat^i(x, infinity), with log|T'(x_(i-1))|."""

    thetas = np.empty(n)
    logs = np.empty(n)
    y = None
    for i in range(n):
        if x == 0.0:
            return thetas[:i], logs[:i], True
        ax = abs(x)
        r = int(1.0 / (lam * ax) + 0.5)
        eps = 1.0 if x > 0 else -1.0
        logs[i] = -2.0 * math.log(ax)
        x = eps / x - lam * r
        y = -lam * r if y is None else eps / y - lam * r
        thetas[i] = 1.0 / (x - y)
    return thetas, logs, False


def _tally(values: np.ndarray, grid: np.ndarray) -> np.ndarray:
    return np.searchsorted(np.sort(values), grid, side="left")


# ---------------------------------------------------------------------------
# Counting functions
# ---------------------------------------------------------------------------

@dataclass
class CountingReport:
    """C(N, x, t) on a grid of thresholds, with the Rosen-time counts C0."""

    N: int
    grid: np.ndarray
    counts: np.ndarray
    rosen_counts: np.ndarray
    rosen_steps: int
    max_theta: float
    terminated: bool = False
    orbits: int = 1

    @property
    def normalized(self) -> np.ndarray:
        return self.counts / self.N

    @property
    def per_rosen_step(self) -> np.ndarray:
        """Counts divided by the number of U-times; linear in t below the breakpoint."""

        return self.counts / max(self.rosen_steps, 1)

    def merge(self, other: "CountingReport") -> "CountingReport":
        if not np.array_equal(self.grid, other.grid):
            raise ValueError("cannot merge counting reports on different grids")
        return CountingReport(
            N=self.N + other.N,
            grid=self.grid,
            counts=self.counts + other.counts,
            rosen_counts=self.rosen_counts + other.rosen_counts,
            rosen_steps=self.rosen_steps + other.rosen_steps,
            max_theta=max(self.max_theta, other.max_theta),
            terminated=self.terminated or other.terminated,
            orbits=self.orbits + other.orbits,
        )

    def rows(self) -> List[Dict[str, Any]]:
        """One CSV row per threshold: t, count, count/N, count/(N t)."""

        return [
            {
                "t": float(t),
                "count": int(c),
                "count_over_N": float(c) / self.N,
                "count_over_Nt": float(c) / (self.N * float(t)),
                "rosen_count": int(c0),
            }
            for t, c, c0 in zip(self.grid, self.counts, self.rosen_counts)
        ]

    def as_dict(self) -> Dict[str, Any]:
        return {
            "N": self.N,
            "orbits": self.orbits,
            "rosen_steps": self.rosen_steps,
            "max_theta": self.max_theta,
            "terminated": self.terminated,
            "counted_by": "orbit index",
            "rows": self.rows(),
        }


def _validate_grid(grid: Sequence[float]) -> np.ndarray:
    values = np.asarray(grid, dtype=float)
    if values.ndim != 1 or values.size == 0 or np.any(values <= 0):
        raise ValueError("grid values must be positive")
    return values


def _counting_from_thetas(thetas: np.ndarray, is_u: np.ndarray, grid: np.ndarray, terminated: bool) -> CountingReport:
    return CountingReport(
        N=len(thetas),
        grid=grid,
        counts=_tally(thetas, grid),
        rosen_counts=_tally(thetas[is_u], grid),
        rosen_steps=int(is_u.sum()),
        max_theta=float(thetas.max()) if len(thetas) else 0.0,
        terminated=terminated,
    )


def count_small_theta(
    ctx: HeckeContext,
    x: Any,
    N: int,
    grid: Sequence[float],
    precision_bits: int = 53,
) -> CountingReport:
    """C(N, x, t) = #{j <= N : Theta(M_1...M_j(infinity), x) < t} for every t in ``grid``.

    Exact inputs run in Q(lambda) and truncate at the terminal point; float
    inputs run on the fast kernel unless ``precision_bits`` asks for more.
    """

    if N < 1:
        raise ValueError("N must be at least 1")
    grid = _validate_grid(grid)
    if isinstance(x, ProjectivePoint) or precision_bits > 53:
        series = theta_orbit(ctx, x, N)
        thetas = np.array([float(v) for v in series.values])
        is_u = np.array([s.is_u for s in series.symbols], dtype=bool)
        return _counting_from_thetas(thetas, is_u, grid, series.terminated)
    kernel = OrbitKernel(ctx, 53)
    if not kernel.in_mediant_interval(float(x)):
        raise OutOfIntervalError(f"x={x} outside [-lambda/2, 2/lambda)")
    thetas, is_u, terminated = _mediant_thetas(kernel.lam, float(x), N)
    if terminated:
        logger.info("[rosen-mediant] orbit of x=%s terminated after %d steps", x, len(thetas))
    return _counting_from_thetas(thetas, is_u, grid, terminated)


def _random_mediant_tally(lam: float, seed: int, orbit_id: int, n: int, grid: np.ndarray) -> CountingReport:
    rng = orbit_rng(seed, orbit_id)
    while True:
        x = rng.uniform(-lam / 2, lam / 2)
        thetas, is_u, terminated = _mediant_thetas(lam, x, n)
        if not terminated:
            return _counting_from_thetas(thetas, is_u, grid, False)
        logger.debug("[rosen-mediant] reseeding orbit %d of seed %d", orbit_id, seed)


def rosen_counting(ctx: HeckeContext, x: Any, N: int, grid: Sequence[float]) -> CountingReport:
    """Counts of theta_n < t along the Rosen orbit; slope lambda/mu(Omega0) below the Rosen constant."""

    if N < 1:
        raise ValueError("N must be at least 1")
    grid = _validate_grid(grid)
    lam = float(ctx.lambda_float)
    if not -lam / 2 <= float(x) < lam / 2:
        raise OutOfIntervalError(f"x={x} outside [-lambda/2, lambda/2)")
    thetas, _, terminated = _rosen_orbit(lam, float(x), N)
    counts = _tally(thetas, grid)
    return CountingReport(
        N=len(thetas),
        grid=grid,
        counts=counts,
        rosen_counts=counts.copy(),
        rosen_steps=len(thetas),
        max_theta=float(thetas.max()) if len(thetas) else 0.0,
        terminated=terminated,
    )


def _run_pool(worker: Callable[..., Any], jobs: Sequence[Tuple[Any, ...]], workers: int) -> List[Any]:
    if workers <= 1 or len(jobs) <= 1:
        return [worker(*job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, *zip(*jobs)))


def random_counting(
    ctx: HeckeContext,
    seeds: Sequence[int],
    N: int,
    grid: Sequence[float],
    workers: int = 1,
) -> List[CountingReport]:
    """One CountingReport per seed, each from a uniformly drawn x in the Rosen interval."""

    grid = _validate_grid(grid)
    lam = float(ctx.lambda_float)
    jobs = [(lam, seed, 0, N, grid) for seed in seeds]
    return _run_pool(_random_mediant_tally, jobs, workers)


def merge_counts(reports: Sequence[CountingReport]) -> CountingReport:
    if not reports:
        raise ValueError("nothing to merge")
    return reduce(CountingReport.merge, reports)


# ---------------------------------------------------------------------------
# Breakpoint
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BreakpointEstimate:
    k: int
    L_hat: float
    plateau_value: float
    corner_L: float
    expected_slope: float
    target: float
    relative_error: float
    grid: Tuple[float, ...]
    ratio: Tuple[float, ...]
    seeds: Tuple[int, ...]
    N: int
    max_theta: float
    candidates: Optional[Dict[str, float]] = None

    def as_dict(self, digits: int = 12) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "k": self.k,
            "L_hat": self.L_hat,
            "corner_L": self.corner_L,
            "plateau_value": self.plateau_value,
            "expected_slope": self.expected_slope,
            "target": self.target,
            "relative_error": self.relative_error,
            "N": self.N,
            "seeds": list(self.seeds),
            "max_theta": self.max_theta,
            "curve": [{"t": t, "ratio": r} for t, r in zip(self.grid, self.ratio)],
        }
        if self.candidates:
            data["candidates"] = {
                name: {"value": value, "relative_error": abs(self.L_hat - value) / value}
                for name, value in self.candidates.items()
            }
        return data


def _corner_fit(grid: np.ndarray, ratio: np.ndarray, plateau: float) -> float:
    """Hinge fit ratio = plateau - b * max(0, t - L), minimizing the squared error over L."""

    best_L, best_sse = float(grid[-1]), math.inf
    for L in grid[1:-1]:
        tail = grid > L
        dt = grid[tail] - L
        resid = plateau - ratio[tail]
        b = float(dt @ resid / (dt @ dt)) if dt.size else 0.0
        sse = float(np.sum((ratio[~tail] - plateau) ** 2) + np.sum((resid - b * dt) ** 2))
        if sse < best_sse:
            best_L, best_sse = float(L), sse
    return best_L


def breakpoint_estimate(
    ctx: HeckeContext,
    seeds: Sequence[int],
    N: int,
    grid: Sequence[float],
    *,
    workers: int = 1,
    min_iter: int = MIN_BREAKPOINT_ITER,
) -> BreakpointEstimate:
    """Empirical Lenstra constant: where F(t)/t leaves its small-t plateau.

    F(t) is the seed-averaged count normalized by Rosen steps.  The plateau
    is the median of F(t)/t over the lowest quartile of the grid, and L_hat
    is the largest grid point still within 1% of it.
    """

    if len(seeds) < 3:
        raise ValueError("breakpoint_estimate needs at least 3 seeds")
    if N < min_iter:
        raise ValueError(f"N must be at least {min_iter}")
    grid = _validate_grid(grid)
    reports = random_counting(ctx, seeds, N, grid, workers)
    F = np.mean([r.per_rosen_step for r in reports], axis=0)
    ratio = F / grid
    curve = {"t": grid.tolist(), "ratio": ratio.tolist()}

    quartile = ratio[: max(1, len(grid) // 4)]
    quartile = quartile[quartile > 0]
    if quartile.size == 0:
        raise InsufficientLinearRegionError("no small-t counts; extend N or the grid", curve)
    plateau = float(np.median(quartile))
    inside = np.flatnonzero(np.abs(ratio - plateau) <= PLATEAU_BAND * plateau)
    if inside.size < 3 or inside[-1] == len(grid) - 1:
        raise InsufficientLinearRegionError("grid does not bracket the breakpoint", curve)
    L_hat = float(grid[inside[-1]])

    with mp.workprec(ctx.precision_bits):
        base, _ = build_domains(ctx)
        expected_slope = float(ctx.lambda_float / domain_measure(base))
    constants = closed_form_constants(ctx)
    target = float(constants.mediant_lenstra)
    candidates = (
        {name: float(value) for name, value in constants.k4_candidates.items()} if constants.k4_candidates else None
    )
    estimate = BreakpointEstimate(
        k=ctx.k,
        L_hat=L_hat,
        plateau_value=plateau,
        corner_L=_corner_fit(grid, ratio, plateau),
        expected_slope=expected_slope,
        target=target,
        relative_error=abs(L_hat - target) / target,
        grid=tuple(grid.tolist()),
        ratio=tuple(ratio.tolist()),
        seeds=tuple(seeds),
        N=N,
        max_theta=max(r.max_theta for r in reports),
        candidates=candidates,
    )
    logger.info("[rosen-mediant] k=%d breakpoint L_hat=%.6f (target %.6f)", ctx.k, L_hat, target)
    return estimate


# ---------------------------------------------------------------------------
# Entropy and Borel frequency
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EntropyEstimate:
    k: int
    N: int
    h_hat: float
    stderr: float
    target: float
    measure: float
    krengel_entropy: float
    expected: float
    relative_error: float

    def as_dict(self) -> Dict[str, Any]:
        return dict(self.__dict__)


def _log_derivatives(lam: float, seed: int, orbit_id: int, n: int) -> np.ndarray:
    rng = orbit_rng(seed, orbit_id)
    while True:
        _, logs, terminated = _rosen_orbit(lam, rng.uniform(-lam / 2, lam / 2), n)
        if not terminated:
            return logs
        logger.debug("[rosen-mediant] reseeding entropy orbit %d", orbit_id)


def lyapunov_entropy(ctx: HeckeContext, N: int, seed: int, batches: int = 20) -> EntropyEstimate:
    """h_hat = (1/N) sum log|T'(x_i)|; h_hat * mu(Omega0) should equal (k-2) pi^2 / (2k)."""

    if N < batches:
        raise ValueError(f"N must be at least {batches}")
    logs = _log_derivatives(float(ctx.lambda_float), seed, 0, N)
    h_hat = float(logs.mean())
    means = np.array([chunk.mean() for chunk in np.array_split(logs, batches)])
    stderr = float(means.std(ddof=1) / math.sqrt(batches))
    with mp.workprec(ctx.precision_bits):
        base, _ = build_domains(ctx)
        measure = float(domain_measure(base))
        expected = float((ctx.k - 2) * mp.pi ** 2 / (2 * ctx.k))
    krengel = h_hat * measure
    return EntropyEstimate(
        k=ctx.k,
        N=N,
        h_hat=h_hat,
        stderr=stderr,
        target=expected / measure,
        measure=measure,
        krengel_entropy=krengel,
        expected=expected,
        relative_error=abs(krengel - expected) / expected,
    )


@dataclass(frozen=True)
class BorelFrequency:
    k: int
    threshold: float
    N: int
    frequency: float
    per_seed: Tuple[float, ...]

    def as_dict(self) -> Dict[str, Any]:
        data = dict(self.__dict__)
        data["per_seed"] = list(self.per_seed)
        return data


def _borel_hits(lam: float, seed: int, orbit_id: int, n: int, threshold: float) -> float:
    rng = orbit_rng(seed, orbit_id)
    while True:
        thetas, _, terminated = _rosen_orbit(lam, rng.uniform(-lam / 2, lam / 2), n)
        if not terminated:
            return float(np.count_nonzero(thetas < threshold)) / n


def borel_frequency(
    ctx: HeckeContext,
    seeds: Sequence[int],
    N: int,
    threshold: Optional[float] = None,
    workers: int = 1,
) -> BorelFrequency:
    """Fraction of Rosen indices with theta_n < C(k), averaged over seeds."""

    if not seeds:
        raise ValueError("at least one seed is required")
    limit = float(ctx.hurwitz_C) if threshold is None else float(threshold)
    jobs = [(float(ctx.lambda_float), seed, 1, N, limit) for seed in seeds]
    per_seed = tuple(_run_pool(_borel_hits, jobs, workers))
    return BorelFrequency(ctx.k, limit, N, float(np.mean(per_seed)), per_seed)


@dataclass(frozen=True)
class WitnessHits:
    k: int
    N: int
    threshold: float
    hits: int
    tail_hits: int
    last_hit: Optional[int]
    period: int

    def as_dict(self) -> Dict[str, Any]:
        return dict(self.__dict__)


def witness_theta_hits(
    ctx: HeckeContext,
    N: int,
    threshold: Optional[float] = None,
    witness: Optional[WitnessOrbit] = None,
) -> WitnessHits:
    """Theta along the orbit of (tau_0, infinity), the x-coordinate cycled through the certified period.

    Hits below C(k) - 0.01 may only happen while y is still converging to the
    periodic fiber values; ``tail_hits`` counts those in the final 90% of the run.
    """

    witness = witness or witness_orbit(ctx)
    limit = float(ctx.hurwitz_C) - 0.01 if threshold is None else float(threshold)
    kernel = OrbitKernel(ctx, 53)
    xs = [float(p.x.to_mpf(64)) if isinstance(p.x, ProjectivePoint) else float(p.x) for p in witness.points]
    period = witness.period
    y = kernel.ninf
    hits = tail = 0
    last: Optional[int] = None
    tail_start = N // 10
    for j in range(N):
        y = kernel.act(witness.symbols[j % period], y)
        theta = 1.0 / (xs[(j + 1) % period] - y)
        if theta < limit:
            hits += 1
            last = j
            if j >= tail_start:
                tail += 1
    return WitnessHits(ctx.k, N, limit, hits, tail, last, period)


# ---------------------------------------------------------------------------
# G_k-rationals and the Legendre audit
# ---------------------------------------------------------------------------

def enumerate_gk_rationals(
    ctx: HeckeContext,
    max_word_len: int,
    q_cap: Optional[float] = None,
) -> List[Tuple[ZLambda, ZLambda]]:
    """Cusps reached from infinity by words in z -> -1/z and z -> z + lambda.

    Breadth-first up to ``max_word_len``, deduplicated by exact value, kept
    when they lie in [-lambda/2, lambda/2) with 0 < c <= q_cap.
    """

    if max_word_len < 1:
        raise ValueError("max_word_len must be at least 1")
    ring = ctx.ring
    shift = ProjectivePoint(ring.lam, ring.one)
    lo = ProjectivePoint(-ring.lam, ring.from_int(2))
    hi = ProjectivePoint(ring.lam, ring.from_int(2))
    start = ProjectivePoint.infinity(ring)
    seen = {start.key()}
    frontier = [start]
    found: List[ProjectivePoint] = []
    for _ in range(max_word_len):
        layer: List[ProjectivePoint] = []
        for z in frontier:
            for image in (-z.reciprocal(), z + shift):
                key = image.key()
                if key in seen:
                    continue
                seen.add(key)
                layer.append(image)
                if image.is_infinite() or image.compare(lo) < 0 or image.compare(hi) >= 0:
                    continue
                if q_cap is not None and zl_eval(image.den, 64).midpoint > q_cap:
                    continue
                found.append(image)
        frontier = layer
    found.sort(key=lambda p: p.to_mpf(64))
    return [(p.num, p.den) for p in found]


@dataclass
class LegendreAudit:
    x: Any
    threshold: float
    checked: int = 0
    violations: List[Dict[str, Any]] = field(default_factory=list)
    inconclusive: List[Dict[str, Any]] = field(default_factory=list)
    terminal: bool = False

    @property
    def passed(self) -> bool:
        return not self.violations

    def as_dict(self, digits: int = 20) -> Dict[str, Any]:
        return {
            "x": format_real(self.x, digits) if not isinstance(self.x, ProjectivePoint) else self.x.to_json(),
            "threshold": self.threshold,
            "checked": self.checked,
            "terminal": self.terminal,
            "violations": self.violations,
            "inconclusive": self.inconclusive,
        }


def _approximant_keys(ctx: HeckeContext, x: Any, depth: int) -> Tuple[set, Any, bool]:
    """Keys of the Rosen and mediant convergents of x, the largest denominator, and termination."""

    digits = expand(ctx, x, depth)
    keys = set()
    largest = mp.zero
    for state in convergents(ctx, digits.digits):
        keys.add(ProjectivePoint(state.p_cur, state.q_cur).key())
        largest = max(largest, state.q_cur.to_mpf(64))
    for entry in mediant_convergents(ctx, x, depth):
        keys.add(entry.fraction.key())
        largest = max(largest, entry.v.to_mpf(64))
    for _, a, c in orbit_fractions(ctx, x, depth):
        keys.add(ProjectivePoint(a, c).key())
    return keys, largest, digits.terminated


def legendre_audit(
    ctx: HeckeContext,
    x: Any,
    threshold: float,
    depth: int,
    rationals: Iterable[Tuple[ZLambda, ZLambda]],
) -> LegendreAudit:
    """Every a/c with Theta(x, a/c) < threshold must be a Rosen or mediant convergent of x.

    Membership is decided on exact values.  A rational whose denominator
    exceeds every listed convergent denominator is inconclusive, not a
    violation.
    """

    if threshold <= 0:
        raise ValueError("threshold must be positive")
    rationals = list(rationals)
    audit = LegendreAudit(x, float(threshold))
    bits = ctx.precision_bits
    if isinstance(x, ProjectivePoint):
        if any(ProjectivePoint(a, c) == x for a, c in rationals):
            audit.terminal = True
            return audit
    else:
        with mp.workprec(bits):
            x = mp.mpf(x)
            close = mp.ldexp(1, -(bits - 8))
            if any(abs(ProjectivePoint(a, c).to_mpf(bits) - x) < close for a, c in rationals):
                audit.terminal = True
                return audit
    keys, largest, terminated = _approximant_keys(ctx, x, depth)
    for a, c in rationals:
        if zl_sign(c) <= 0:
            continue
        theta = theta_direct(ctx, x, a, c)
        if not theta < threshold:
            continue
        audit.checked += 1
        point = ProjectivePoint(a, c)
        if point.key() in keys:
            continue
        entry = {"a": a.to_json(), "c": c.to_json(), "theta": format_real(theta, 15)}
        if not terminated and c.to_mpf(64) >= largest:
            audit.inconclusive.append(entry)
        else:
            audit.violations.append(entry)
    return audit


def find_legendre_counterexample(
    ctx: HeckeContext,
    threshold: float,
    rationals: Sequence[Tuple[ZLambda, ZLambda]],
    samples: int,
    seed: int,
    depth: int = 40,
) -> Optional[Dict[str, Any]]:
    """Search x close to enumerated rationals for a small Theta that no convergent explains."""

    rng = orbit_rng(seed, 7)
    bits = ctx.precision_bits
    half = float(ctx.lambda_float) / 2
    candidates = [(a, c) for a, c in rationals if not a.is_zero()]
    if not candidates:
        return None
    for attempt in range(samples):
        a, c = candidates[int(rng.integers(len(candidates)))]
        with mp.workprec(bits):
            centre = ProjectivePoint(a, c).to_mpf(bits)
            radius = threshold / c.to_mpf(bits) ** 2
            x = centre + radius * mp.mpf(rng.uniform(-0.99, 0.99))
        if not -half < float(x) < half or x == centre:
            continue
        audit = legendre_audit(ctx, x, threshold, depth, [(a, c)])
        if audit.violations:
            logger.info("[rosen-mediant] Legendre counterexample after %d attempts", attempt + 1)
            return {"x": format_real(x, 30), "attempts": attempt + 1, **audit.violations[0]}
    return None
