"""Exception types shared across the package."""


class QConnectError(Exception):
    """Base class for every error raised by this package."""


class DomainError(QConnectError, ValueError):
    """The requested point lies outside an operation's domain of validity."""


class SpiralProximity(DomainError):
    """A point falls within the exclusion tolerance of a q-spiral."""


class PoleHit(DomainError):
    """Evaluation was requested within the exclusion radius of a pole."""


class ZeroArgument(DomainError):
    """The argument must be nonzero."""


class ThetaZero(DomainError):
    """A theta value in a denominator is numerically zero."""


class DivergentSeries(DomainError):
    """The series has radius of convergence zero and does not terminate."""


class OutsideRadius(DomainError):
    """The argument lies outside the series' radius of convergence."""


class BadLowerParameter(DomainError):
    """A lower parameter of a basic hypergeometric series lies in q^(-N)."""


class BaseMismatch(QConnectError):
    """Operands carry different q bases."""


class TruncationExceeded(QConnectError):
    """The term cap was reached before the tail criterion was met."""


class NoConvergence(QConnectError):
    """Node doubling reached its cap without two agreeing values."""


class PoleOnContour(QConnectError):
    """The integrand could not be evaluated on the quadrature contour."""


class EmptyGrid(QConnectError):
    """Every grid point was excluded before evaluation."""
