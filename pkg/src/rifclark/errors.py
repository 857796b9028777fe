"""Exception types shared across the package.

Every failure mode that callers are expected to branch on gets its own
class so the CLI can map it to a structured error report.
"""

from __future__ import annotations


class RifclarkError(Exception):
    """Base class for all package-specific errors."""


class DegreeNotAttained(RifclarkError):
    """A declared polynomial degree has no matching nonzero coefficient."""


class ZeroPolynomial(RifclarkError):
    """An operation received the zero polynomial where that is meaningless."""


class RootFindFailure(RifclarkError):
    """The eigenvalue root solver failed to converge."""


class IdenticallyZeroSlice(RifclarkError):
    """A univariate slice polynomial vanished identically.

    For level polynomials this signals a line component through the
    slice point rather than a numerical failure.
    """


class ContinuationCollision(RifclarkError):
    """Two traced branches approached each other too closely to relabel safely."""


class ZeroOverZero(RifclarkError):
    """Both numerator and denominator of a branch weight vanished."""


class NonConstantDerivative(RifclarkError):
    """The directional derivative along a line component was not constant."""


class MassNotOne(RifclarkError):
    """A probability-measure precondition failed (total mass != 1)."""


class FitDegenerate(RifclarkError):
    """A log-log decay fit had too little dynamic range or a bad residual."""


class NonConvergent(RifclarkError):
    """Richardson extrapolation of a boundary value did not settle."""


class DenominatorVanishes(RifclarkError):
    """The denominator of a rational conjugate has a zero on the closed disk."""


class SingularDenominator(RifclarkError):
    """A closed-form level parametrization was evaluated at a singular point."""


class UnstableDenominator(RifclarkError):
    """A stability certificate ruled the denominator polynomial out."""
