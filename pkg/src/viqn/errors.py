"""Exception and warning types shared across the package."""


class ViqnError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(ViqnError):
    """A vector or matrix has an incompatible shape."""


class InfeasibleSet(ViqnError):
    """A feasible set turned out to be empty (phase-one failed)."""


class CycleLimitExceeded(ViqnError):
    """The active-set projection hit its anti-cycling pivot cap."""


class InnerMaxIterExceeded(ViqnError):
    """The subproblem solver ran out of iterations before meeting its tests."""


class SingularSystem(ViqnError):
    """Direct linear solve rejected: symmetric part numerically singular."""


class LineSearchExhausted(ViqnError):
    """No step exponent up to the cap satisfied the line-search inequality."""


class ZeroNormal(ViqnError):
    """Hyperplane normal has (numerically) zero length."""


class UnknownProblem(ViqnError):
    """Problem name not present in the registry."""


class BadDimension(ViqnError):
    """Requested dimension is invalid for a fixed-size problem."""


class NonFiniteEvaluation(ViqnError):
    """A mapping evaluation produced NaN or infinity."""


class JacobianUnavailable(ViqnError):
    """No analytic Jacobian and the finite-difference fallback is disabled."""


class KeyMismatch(ViqnError):
    """Two result tables do not describe the same set of runs."""


class DegenerateCurvatureWarning(UserWarning):
    """Curvature test passed but s'Bs is numerically zero; update skipped."""
