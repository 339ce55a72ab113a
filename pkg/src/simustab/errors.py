"""Exception hierarchy.

Errors fall in two families that the command line maps to exit codes:
:class:`InfeasibilityError` (the problem data admits no solution of the
requested kind, exit 2) and :class:`NumericalError` (an algorithm failed on
data that may well be feasible, exit 3).  Shape and argument errors derive
from :class:`ValueError` as well.
"""


class SimustabError(Exception):
    """Base class for every error raised by this package."""


class InfeasibilityError(SimustabError):
    pass


class NumericalError(SimustabError):
    pass


# --- rational algebra -------------------------------------------------------

class DegreeError(SimustabError, ValueError):
    pass


class ShapeError(SimustabError, ValueError):
    pass


class PoleEvaluation(NumericalError):
    """Evaluation requested at (or numerically on top of) a pole."""


class SingularMatrix(NumericalError):
    pass


# --- pencil / interpolation data ---------------------------------------------

class DegeneratePencil(InfeasibilityError):
    pass


class ImproperPencil(InfeasibilityError):
    """``det M(s)`` vanishes at infinity."""


class NonSimpleZero(InfeasibilityError):
    pass


class BoundaryZero(InfeasibilityError):
    pass


class RankAssumptionViolated(InfeasibilityError):
    pass


class UnassignableDirection(InfeasibilityError):
    pass


class AlphaInfeasible(InfeasibilityError):
    pass


class BranchCutError(InfeasibilityError):
    pass


class NotCaratheodoryData(InfeasibilityError):
    pass


class NoRealBase(SimustabError):
    """No real node to anchor the normalization; callers fall back to an
    artificial node at the origin."""


# --- CEE -----------------------------------------------------------------------

class DegenerateNodeSet(NumericalError):
    pass


class InternalPositivityError(NumericalError):
    pass


class ContinuationFailure(NumericalError):
    pass


class InfeasibleData(InfeasibilityError):
    pass


class UnstableSigma(InfeasibilityError):
    """``J - Sigma H`` has an eigenvalue on or outside the unit circle, so
    ``Sigma`` does not define a minimum-phase spectral factor."""


class OutsideDomain(SimustabError, ValueError):
    pass


# --- synthesis -------------------------------------------------------------------

class NotAUnit(InfeasibilityError):
    pass


class InterpolationMismatch(NumericalError):
    pass


class RangeError(SimustabError, ValueError):
    pass


class DegenerateFamily(InfeasibilityError):
    pass


class ConfigError(SimustabError, ValueError):
    """Malformed configuration; ``field`` names the offending entry."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
