"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: domain errors exit 2, precision
errors exit 3 and non-convergence exits 4.
"""


class PlanarError(Exception):
    """Base class for every error raised by the package."""


class DomainError(PlanarError, ValueError):
    """An argument lies outside the documented domain of an operation."""


class ContourCollisionError(DomainError):
    """A pole or evaluation point sits (numerically) on an integration contour."""


class RoutingError(DomainError):
    """No admissible integration path exists for the requested endpoint."""


class PrecisionError(PlanarError, ArithmeticError):
    """Working precision is insufficient for a trustworthy result."""


class DegenerateStateError(PrecisionError):
    """The coefficient recurrence hit a vanishing denominator."""

    def __init__(self, message, n=None):
        super().__init__(message)
        self.n = n


class NonConvergenceError(PlanarError, RuntimeError):
    """An iterative method failed to converge.

    ``partial`` carries whatever the method had when it gave up.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class TracingError(NonConvergenceError):
    """A curve tracer could not continue."""


class ProtocolError(DomainError):
    """A validation protocol's own preconditions were violated."""
