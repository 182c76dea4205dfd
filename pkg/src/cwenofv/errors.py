"""Exception types raised by the reconstruction and solver layers."""


class CwenoError(Exception):
    """Base class for all package errors."""


class RankDeficient(CwenoError):
    """Least-squares design matrix is numerically rank deficient."""


class StencilTooSmall(CwenoError):
    """Stencil has fewer cells than the polynomial has coefficients."""


class DegreeMismatch(CwenoError):
    """Polynomial degree exceeds what the smoothness system supports."""


class UnsupportedDimension(CwenoError):
    """Requested space dimension is not supported."""


class UnsupportedM(CwenoError):
    """No closed-form smooth-part reference for this degree."""


class DegreeViolation(CwenoError):
    """Candidate polynomial degrees do not satisfy the blend's requirements."""


class MismatchedCells(CwenoError):
    """Polynomials passed to a blend do not live on the same cell."""


class UnknownPreset(CwenoError):
    """Unknown name for a global-smoothness-indicator coefficient preset."""


class InsufficientGhosts(CwenoError):
    """Field does not carry enough ghost cells for the requested stencil."""


class InadmissibleState(CwenoError):
    """Physical state with non-positive density or pressure."""


class UnsupportedCombination(CwenoError):
    """Boundary rule not available for this field/side combination."""


class SimulationBlowup(CwenoError):
    """Time integration produced NaN or an inadmissible state.

    Carries the time and flat cell index of the first failure.
    """

    def __init__(self, message, time=None, cell=None):
        super().__init__(message)
        self.time = time
        self.cell = cell


class NonPositiveError(CwenoError):
    """Order estimation requires strictly positive error values."""


class SpecError(CwenoError):
    """Malformed experiment specification."""
