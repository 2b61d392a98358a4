"""Exception hierarchy shared by all latticesum modules."""


class LatticeSumError(Exception):
    """Base class for all domain errors raised by this package."""


class ParseError(LatticeSumError):
    """Malformed input (JSON, polynomial string, job spec)."""


# -- exact arithmetic --------------------------------------------------------

class Singular(LatticeSumError):
    """A linear system that should be invertible is not."""


class NotRational(LatticeSumError):
    """A cyclotomic number expected to be rational has irrational part."""


class CyclotomicOrderTooLarge(LatticeSumError):
    """Requested cyclotomic order exceeds the configured cap."""


# -- polytope geometry -------------------------------------------------------

class NotSimple(LatticeSumError):
    """More than n facets are tight at some vertex."""


class NotIntegral(LatticeSumError):
    """Some vertex has a non-integer coordinate."""


class NotPrimitive(LatticeSumError):
    """Some facet normal is not a primitive lattice covector."""


class Unbounded(LatticeSumError):
    """The half-space intersection is not bounded."""


class Redundant(LatticeSumError):
    """Some facet can be dropped without changing the polytope."""


class NonGeneric(LatticeSumError):
    """Polarizing vector pairs to zero with some edge vector."""


class DecompositionViolated(LatticeSumError):
    """Weighted polar decomposition identity failed at a witness point."""


class TooLarge(LatticeSumError):
    """Lattice enumeration would exceed the configured point cap."""


class InternalError(LatticeSumError):
    """Invariant violation that indicates a bug, not bad input."""


# -- 1-D machinery -----------------------------------------------------------

class JumpPoint(LatticeSumError):
    """P_1 evaluated at an integer, where it jumps."""


class LambdaOne(LatticeSumError):
    """Twisted construction called with the trivial root of unity."""


class QuadratureFailure(LatticeSumError):
    """Numerical integration did not reach the requested tolerance."""


# -- face groups -------------------------------------------------------------

class NotInjective(LatticeSumError):
    """A face-group inclusion map failed to be one-to-one."""


class PartitionViolated(LatticeSumError):
    """Flat subsets do not partition a vertex group."""


class ClaimViolated(LatticeSumError):
    """Character angles violate a structural consistency check."""


class NotRegular(LatticeSumError):
    """Regular-polytope path invoked on a polytope with nontrivial groups."""
