"""Exception hierarchy.

Everything raised on purpose by this package derives from MangoldtError so
callers can catch one type at the boundary. Subclasses separate "your input
is outside the contract" from "the computation could not be completed to
tolerance", which want different handling (fix the call vs. loosen the
request or report failure).
"""


class MangoldtError(Exception):
    """Base class for all package errors."""


class AdmissibilityError(MangoldtError):
    """Profile data violates the surface-of-revolution admissibility rules."""


class DomainError(MangoldtError):
    """Query outside the model's stated domain."""


class NoConvergenceError(MangoldtError):
    """An iterative solve failed to reach tolerance.

    Carries whatever partial state the solver had; see .details.
    """

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details or {}


class InconsistencyError(MangoldtError):
    """A computed result contradicts a structural guarantee of the model
    class (e.g. a conjugate point on a minimal segment)."""


class TriangleError(MangoldtError):
    """Comparison triangle cannot be built from the given side data."""


class DominanceError(MangoldtError):
    """Curvature dominance precondition fails on the sampled grid."""
