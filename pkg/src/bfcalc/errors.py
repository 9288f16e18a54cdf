"""Exception types raised by bfcalc."""


class BfcalcError(Exception):
    """Base class for all library errors."""


class DomainError(BfcalcError, ValueError):
    """An argument lies outside the domain of the operation."""


class AdmissibilityError(BfcalcError, ValueError):
    """A measure violates its integrability condition."""


class UnsupportedRepresentation(BfcalcError, TypeError):
    """The requested operation needs a representation the object lacks."""


class SpecError(BfcalcError, ValueError):
    """A JSON function/matrix/family spec failed validation."""


class AnalyticityError(BfcalcError):
    """Evaluation failed on a Cauchy circle."""


class NotSectorialError(BfcalcError):
    """The matrix has spectrum on (-inf, 0]."""


class NearSpectrumError(BfcalcError):
    """A shifted matrix is singular to working precision."""

    def __init__(self, msg, distance):
        super().__init__(msg)
        self.distance = distance


class ContourError(BfcalcError):
    """The integration contour is too close to the spectrum."""


class ConvergenceError(BfcalcError):
    """Quadrature did not reach its target.

    ``achieved`` holds the last error estimate.
    """

    def __init__(self, msg, achieved):
        super().__init__(msg)
        self.achieved = achieved
