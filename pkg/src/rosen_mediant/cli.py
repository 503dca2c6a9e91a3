"""Command line utilities for rosen-mediant."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from mpmath import mp

from .algebraic_ring import is_exact_literal, parse_exact_literal
from .config import OUTPUT_FORMATS, ConfigLoader, RunConfig
from .ergodic_stats import (
    MIN_BREAKPOINT_ITER,
    borel_frequency,
    breakpoint_estimate,
    enumerate_gk_rationals,
    find_legendre_counterexample,
    legendre_audit,
    lyapunov_entropy,
    merge_counts,
    orbit_rng,
    random_counting,
    witness_theta_hits,
)
from .errors import InsufficientLinearRegionError, RosenMediantError
from .hecke_context import SCHEMA_VERSION, HeckeContext, closed_form_constants, format_real, new_context
from .planar_extension import build_domains, domain_measure, dual_partition, image_decomposition, witness_orbit
from .rosen_maps import OrbitKernel, convergents, expand, mediant_convergents, symbol_expand, theta_orbit
from .verification import CHECKS, run_verification

logger = logging.getLogger(__name__)


def main(argv: List[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)

    handlers = {
        "context": _command_context,
        "expand": _command_expand,
        "domain": _command_domain,
        "verify": _command_verify,
        "stats": _command_stats,
        "witness": _command_witness,
        "legendre-audit": _command_legendre_audit,
    }
    handler = handlers.get(args.command)
    if handler is None:
        return _emit_error(f"Unknown command: {args.command}", as_json=False)

    try:
        config, ctx = _prepare(args)
    except (ValueError, OSError) as exc:
        return _emit_error(exc, as_json=args.format in (None, "json"))
    try:
        return handler(args, config, ctx)
    except RosenMediantError as exc:
        return _emit_error(exc, as_json=config.output_format == "json")


# ---------------------------------------------------------------------------
# Context / expand / domain
# ---------------------------------------------------------------------------

def _command_context(args: argparse.Namespace, config: RunConfig, ctx: HeckeContext) -> int:
    payload = ctx.explain(config.digits)
    payload["constants"] = closed_form_constants(ctx).as_dict(config.digits)
    _emit(payload, config)
    return 0


def _command_expand(args: argparse.Namespace, config: RunConfig, ctx: HeckeContext) -> int:
    x = _parse_point(ctx, args.x)
    depth = config.depth
    digits = expand(ctx, x, depth)
    symbols = symbol_expand(ctx, x, depth)
    payload: Dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "k": ctx.k,
        "x": args.x,
        "depth": depth,
        "digits": digits.to_mapping(),
        "symbols": symbols.to_mapping(),
        "u_positions": list(symbols.u_positions),
        "convergents": [s.to_mapping(config.digits) for s in convergents(ctx, digits.digits)],
        "mediants": [m.to_mapping(config.digits) for m in mediant_convergents(ctx, x, depth)] if len(symbols) else [],
        "theta": theta_orbit(ctx, x, depth).to_mapping(config.digits) if len(symbols) else None,
    }
    if digits.terminated and not len(digits):
        payload["notice"] = "x is terminal: the expansion is empty"
    _emit(payload, config, text_lines=[f"digits  : {digits}", f"symbols : {' '.join(s.value for s in symbols)}"])
    return 0


def _command_domain(args: argparse.Namespace, config: RunConfig, ctx: HeckeContext) -> int:
    base, star = build_domains(ctx)
    with mp.workprec(ctx.precision_bits):
        measure = domain_measure(base)
    payload: Dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "k": ctx.k,
        "omega0": base.to_mapping(config.digits),
        "omega_star": star.to_mapping(config.digits),
        "measure_omega0": format_real(measure, config.digits),
    }
    if args.images:
        payload["images"] = [p.to_mapping(config.digits) for p in image_decomposition(ctx, star)]
    if args.dual:
        kernel = OrbitKernel(ctx)
        with kernel.precision():
            payload["dual_partition"] = {
                name: [format_real(lo, config.digits), format_real(hi, config.digits)]
                for name, (lo, hi) in dual_partition(ctx, kernel).items()
            }
    rows = [
        {"domain": d.label, "fiber": i, **f.to_mapping(config.digits)}
        for d in (base, star)
        for i, f in enumerate(d.fibers)
    ]
    _emit(payload, config, csv_rows=rows)
    return 0


# ---------------------------------------------------------------------------
# Verify / witness
# ---------------------------------------------------------------------------

def _command_verify(args: argparse.Namespace, config: RunConfig, ctx: HeckeContext) -> int:
    sections = config.sections
    if args.samples is not None:
        sections.setdefault("verify", {})["samples"] = args.samples
    report = run_verification(ctx, sections, config.seed, args.check)
    lines = [f"{'✅' if c.passed else '❌'} {c.name}" for c in report.checks]
    rows = [{"check": c.name, "passed": c.passed} for c in report.checks]
    _emit(report.as_dict(), config, csv_rows=rows, text_lines=lines)
    return 0 if report.passed else 1


def _command_witness(args: argparse.Namespace, config: RunConfig, ctx: HeckeContext) -> int:
    orbit = witness_orbit(ctx, config.section("verify").get("witness_precision_bits", 512))
    hits = witness_theta_hits(ctx, config.n_iter, witness=orbit)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "orbit": orbit.to_mapping(config.digits),
        "hits": hits.as_dict(),
    }
    _emit(payload, config, text_lines=[f"period {orbit.period}, min Theta {format_real(orbit.min_theta, 20)}"])
    return 0


# ---------------------------------------------------------------------------
# Statistics
# ---------------------------------------------------------------------------

def _command_stats(args: argparse.Namespace, config: RunConfig, ctx: HeckeContext) -> int:
    stats = config.section("stats")
    seeds = args.seeds if args.seeds else stats.get("seeds", [config.seed])
    workers = int(stats.get("workers", 1))
    grid = config.grid

    merged = merge_counts(random_counting(ctx, seeds, config.n_iter, grid, workers))
    payload: Dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "k": ctx.k,
        "n_iter": config.n_iter,
        "seeds": list(seeds),
        "counting": merged.as_dict(),
    }
    status = 0
    if config.n_iter < MIN_BREAKPOINT_ITER or len(seeds) < 3:
        payload["breakpoint"] = {"skipped": f"needs >= 3 seeds and n_iter >= {MIN_BREAKPOINT_ITER}"}
    else:
        try:
            payload["breakpoint"] = breakpoint_estimate(ctx, seeds, config.n_iter, grid, workers=workers).as_dict()
        except InsufficientLinearRegionError as exc:
            payload["breakpoint"] = {"error": str(exc), "curve": exc.curve}
            status = 1
    if args.entropy:
        payload["entropy"] = lyapunov_entropy(ctx, int(stats.get("entropy_iter", config.n_iter)), config.seed).as_dict()
    if args.borel:
        payload["borel"] = borel_frequency(ctx, seeds, int(stats.get("borel_iter", config.n_iter)), workers=workers).as_dict()
    _emit(payload, config, csv_rows=merged.rows())
    return status


def _command_legendre_audit(args: argparse.Namespace, config: RunConfig, ctx: HeckeContext) -> int:
    audit = config.section("audit")
    word_length = args.word_length or int(audit.get("word_length", 8))
    samples = args.samples or int(audit.get("samples", 100))
    depth = int(audit.get("depth", 40))
    lenstra = float(closed_form_constants(ctx).mediant_lenstra)
    threshold = args.threshold if args.threshold is not None else lenstra + float(audit.get("threshold_offset", -0.01))

    rationals = enumerate_gk_rationals(ctx, word_length)
    rng = orbit_rng(config.seed, 20)
    half = float(ctx.lambda_float) / 2
    violations: List[Dict[str, Any]] = []
    inconclusive = terminal = checked = 0
    for value in rng.uniform(-half, half, samples):
        with mp.workprec(ctx.precision_bits):
            x = mp.mpf(value)
        result = legendre_audit(ctx, x, threshold, depth, rationals)
        checked += result.checked
        inconclusive += len(result.inconclusive)
        terminal += int(result.terminal)
        violations.extend({"x": format_real(x, 20), **v} for v in result.violations)

    payload: Dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "k": ctx.k,
        "threshold": threshold,
        "mediant_lenstra": lenstra,
        "rationals": len(rationals),
        "samples": samples,
        "checked": checked,
        "inconclusive": inconclusive,
        "terminal": terminal,
        "violations": violations[:20],
        "violation_count": len(violations),
    }
    if args.search:
        above = lenstra + float(audit.get("counterexample_offset", 0.05))
        payload["counterexample"] = {
            "threshold": above,
            "found": find_legendre_counterexample(
                ctx, above, rationals, int(audit.get("counterexample_samples", 2000)), config.seed
            ),
        }
    _emit(payload, config, csv_rows=violations)
    return 0 if not violations else 1


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rosen-mediant", description="Rosen and mediant continued fractions for the Hecke groups G_k"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    context_parser = subparsers.add_parser("context", help="Show lambda, R, C(k) and the boundary tables")
    _add_common_options(context_parser)

    expand_parser = subparsers.add_parser("expand", help="Rosen digits, mediant symbols, convergents and Theta")
    _add_common_options(expand_parser)
    expand_parser.add_argument("--x", required=True, help="Decimal or exact literal such as (1-l)/2")
    expand_parser.add_argument("--depth", type=int, help="Number of steps to expand")

    domain_parser = subparsers.add_parser("domain", help="Fibers of Omega0 and OmegaStar")
    _add_common_options(domain_parser)
    domain_parser.add_argument("--images", action="store_true", help="Include the branch images under S_hat")
    domain_parser.add_argument("--dual", action="store_true", help="Include the partition of the dual map")

    verify_parser = subparsers.add_parser("verify", help="Run the verification suite")
    _add_common_options(verify_parser)
    verify_parser.add_argument("--samples", type=int, help="Monte-Carlo points for the bijectivity audit")
    verify_parser.add_argument("--check", action="append", choices=sorted(CHECKS), help="Run only this check")

    stats_parser = subparsers.add_parser("stats", help="Counting curves, breakpoint, entropy, Borel frequency")
    _add_common_options(stats_parser)
    stats_parser.add_argument("--n-iter", type=int, help="Orbit length per seed")
    stats_parser.add_argument("--grid", help="Threshold grid lo:hi:steps")
    stats_parser.add_argument("--seeds", type=int, nargs="+", help="Seeds for independent orbits")
    stats_parser.add_argument("--entropy", action="store_true", help="Estimate the Lyapunov exponent")
    stats_parser.add_argument("--borel", action="store_true", help="Frequency of theta_n < C(k)")

    witness_parser = subparsers.add_parser("witness", help="Certify the periodic witness orbit")
    _add_common_options(witness_parser)
    witness_parser.add_argument("--n-iter", type=int, help="Steps along the witness orbit")

    audit_parser = subparsers.add_parser("legendre-audit", help="Audit small-Theta rationals against convergents")
    _add_common_options(audit_parser)
    audit_parser.add_argument("--threshold", type=float, help="Theta threshold (default: Lenstra constant - 0.01)")
    audit_parser.add_argument("--samples", type=int, help="Number of random x")
    audit_parser.add_argument("--word-length", type=int, help="Maximal word length of enumerated rationals")
    audit_parser.add_argument("--search", action="store_true", help="Also search for a counterexample above it")

    return parser


def _add_common_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--k", type=_hecke_index, help="Hecke group index k >= 4")
    parser.add_argument("--precision", type=int, help="Context precision in bits")
    parser.add_argument("--seed", type=int, help="Base seed for random streams")
    parser.add_argument("--format", choices=OUTPUT_FORMATS, help="Output format")
    parser.add_argument("--out", help="Write output to this file instead of stdout")
    parser.add_argument("--root", default=".", help="Project root (defaults to current directory)")
    parser.add_argument("--config", help="Optional JSON file containing configuration overrides")
    parser.add_argument("--verbose", "-v", action="store_true", help="Log progress to stderr")


def _hecke_index(raw: str) -> int:
    try:
        k = int(raw)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"k must be an integer, got {raw!r}") from exc
    if k < 4:
        raise argparse.ArgumentTypeError(f"k must be at least 4, got {k}")
    return k


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s %(message)s",
    )


def _prepare(args: argparse.Namespace) -> Tuple[RunConfig, HeckeContext]:
    inline = _load_config_json(args.config) if args.config else None
    merged = ConfigLoader(Path(args.root)).load(inline)
    config = RunConfig.from_mapping(
        merged,
        k=args.k,
        precision_bits=args.precision,
        seed=args.seed,
        n_iter=getattr(args, "n_iter", None),
        depth=getattr(args, "depth", None),
        grid_spec=getattr(args, "grid", None),
        output_format=args.format,
        output_path=args.out,
    )
    return config, new_context(config.k, config.precision_bits)


def _load_config_json(path: str) -> Dict[str, Any]:
    config_path = Path(path)
    if not config_path.exists():
        raise ValueError(f"Config file not found: {path}")
    try:
        return json.loads(config_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"Unable to parse config JSON: {exc}") from exc


def _parse_point(ctx: HeckeContext, raw: str) -> Any:
    if is_exact_literal(raw):
        return parse_exact_literal(ctx.ring, raw)
    with mp.workprec(ctx.precision_bits):
        try:
            return mp.mpf(raw)
        except ValueError as exc:
            raise ValueError(f"cannot parse x={raw!r}") from exc


def _emit(
    payload: Dict[str, Any],
    config: RunConfig,
    *,
    csv_rows: Optional[List[Dict[str, Any]]] = None,
    text_lines: Optional[List[str]] = None,
) -> None:
    if config.output_format == "csv" and csv_rows is not None:
        buffer = io.StringIO()
        if csv_rows:
            writer = csv.DictWriter(buffer, fieldnames=list(csv_rows[0]), lineterminator="\n")
            writer.writeheader()
            for row in csv_rows:
                writer.writerow({key: _cell(value) for key, value in row.items()})
        text = buffer.getvalue()
    elif config.output_format == "text" and text_lines is not None:
        text = "\n".join(text_lines) + "\n"
    else:
        text = json.dumps(payload, indent=2, default=str) + "\n"

    if config.output_path is not None:
        config.output_path.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _cell(value: Any) -> Any:
    return json.dumps(value) if isinstance(value, (dict, list)) else value


def _emit_error(problem: "str | Exception", *, as_json: bool) -> int:
    """Report a failed command; library errors carry their class name as ``kind``."""

    if isinstance(problem, RosenMediantError):
        kind, message = type(problem).__name__, f"{type(problem).__name__}: {problem}"
    elif isinstance(problem, Exception):
        kind, message = type(problem).__name__, str(problem)
    else:
        kind, message = "UsageError", problem
    logger.debug("[rosen-mediant] %s: %s", kind, message)
    if as_json:
        print(json.dumps({"schema_version": SCHEMA_VERSION, "kind": kind, "error": message}, indent=2))
    else:
        print(f"rosen-mediant: error: {message}", file=sys.stderr)
    return 1


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
