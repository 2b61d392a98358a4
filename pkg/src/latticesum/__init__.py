"""Exact weighted lattice-point sums over simple integral polytopes.

The library evaluates sums of polynomials over the lattice points of a
simple integral polytope (with boundary points weighted by 2^-codim)
through an exact Euler-Maclaurin formula, and numerically verifies the
corresponding formula with remainder for smooth compactly supported
functions.
"""

from .errors import (
    CyclotomicOrderTooLarge,
    DecompositionViolated,
    InternalError,
    JumpPoint,
    LambdaOne,
    LatticeSumError,
    NonGeneric,
    NotInjective,
    NotIntegral,
    NotPrimitive,
    NotRational,
    NotRegular,
    NotSimple,
    ParseError,
    PartitionViolated,
    QuadratureFailure,
    Redundant,
    Singular,
    TooLarge,
    Unbounded,
)
from .exactnum import CyclotomicNumber, RationalAngle, Rational
from .multipoly import MultiPoly, parse_polynomial, format_rational
from .polytope import (
    HPolytope,
    choose_polarizing_vector,
    compute_vertices,
    enumerate_lattice_points,
    face_lattice,
    polar_decomposition_check,
    polarize,
    validate,
    weighted_indicator,
    weighted_sum_bruteforce,
)
from .bernoulli1d import (
    M_poly,
    bernoulli_numbers,
    em_interval,
    periodic_P,
    twisted_Q,
    twisted_ray_sum,
)
from .emcore import (
    character_angles,
    dilation_integral_poly,
    face_group,
    flat_subsets,
    inclusion_map,
    weighted_sum_polynomial,
    weighted_sum_regular,
)
from .remainder import (
    Report,
    SmoothFunction,
    gaussian_bump,
    poly_times_bump,
    poly_times_plateau,
    polytope_remainder,
    trig_times_bump,
    verify_main_theorem,
)

__version__ = "1.0.0"

__all__ = [
    "CyclotomicNumber",
    "HPolytope",
    "MultiPoly",
    "Rational",
    "RationalAngle",
    "Report",
    "SmoothFunction",
    "bernoulli_numbers",
    "character_angles",
    "choose_polarizing_vector",
    "compute_vertices",
    "dilation_integral_poly",
    "em_interval",
    "enumerate_lattice_points",
    "face_group",
    "face_lattice",
    "flat_subsets",
    "format_rational",
    "gaussian_bump",
    "inclusion_map",
    "M_poly",
    "parse_polynomial",
    "periodic_P",
    "polar_decomposition_check",
    "polarize",
    "poly_times_bump",
    "poly_times_plateau",
    "polytope_remainder",
    "trig_times_bump",
    "twisted_Q",
    "twisted_ray_sum",
    "validate",
    "verify_main_theorem",
    "weighted_indicator",
    "weighted_sum_bruteforce",
    "weighted_sum_polynomial",
    "weighted_sum_regular",
]
