"""Rosen continued fractions and mediant maps for the Hecke groups G_k."""

from .algebraic_ring import LambdaRing, MobiusZL, ProjectivePoint, ZLambda, parse_exact_literal
from .config import DEFAULT_CONFIG, ConfigLoader, RunConfig
from .errors import RosenMediantError
from .ergodic_stats import (
    borel_frequency,
    breakpoint_estimate,
    count_small_theta,
    enumerate_gk_rationals,
    legendre_audit,
    lyapunov_entropy,
)
from .hecke_context import HeckeContext, closed_form_constants, new_context
from .planar_extension import (
    PlanarPoint,
    build_domains,
    domain_measure,
    geometric_lenstra,
    nat_ext_step,
    rect_measure,
    witness_orbit,
)
from .rosen_maps import (
    MediantSymbol,
    convergents,
    expand,
    mediant_convergents,
    mediant_step,
    rosen_step,
    symbol_expand,
    theta_direct,
    theta_orbit,
)
from .verification import run_verification

__all__ = [
    "ConfigLoader",
    "DEFAULT_CONFIG",
    "HeckeContext",
    "LambdaRing",
    "MediantSymbol",
    "MobiusZL",
    "PlanarPoint",
    "ProjectivePoint",
    "RosenMediantError",
    "RunConfig",
    "ZLambda",
    "borel_frequency",
    "breakpoint_estimate",
    "build_domains",
    "closed_form_constants",
    "convergents",
    "count_small_theta",
    "domain_measure",
    "enumerate_gk_rationals",
    "expand",
    "geometric_lenstra",
    "legendre_audit",
    "lyapunov_entropy",
    "mediant_convergents",
    "mediant_step",
    "nat_ext_step",
    "new_context",
    "parse_exact_literal",
    "rect_measure",
    "rosen_step",
    "run_verification",
    "symbol_expand",
    "theta_direct",
    "theta_orbit",
    "witness_orbit",
]
