"""Exception hierarchy.

The CLI maps these onto exit codes: input errors -> 2, degenerate or singular
configurations -> 3, convergence failures -> 4, violated invariants -> 5.
"""


class InputError(ValueError):
    """Malformed user input (JSON schema, flags)."""


class DegenerateCurveError(ValueError):
    """Two branch points coincide (to within tolerance)."""


class DegenerateModuliError(DegenerateCurveError):
    """Two roots of the cubic are (nearly) equal."""


class ClearanceError(DegenerateCurveError):
    """A contour or a moduli path comes too close to a singularity.

    ``param`` holds the offending path parameter or location when known.
    """

    def __init__(self, message, param=None):
        super().__init__(message)
        self.param = param


class RootTrackingError(DegenerateCurveError):
    """Nearest-neighbour root matching is ambiguous."""

    def __init__(self, message, param=None):
        super().__init__(message)
        self.param = param


class ConvergenceError(RuntimeError):
    """Quadrature or ODE integration failed to reach the requested tolerance."""


class SingularityError(ConvergenceError):
    """Adaptive step size fell below the floor, usually near a pole of the connection."""

    def __init__(self, message, param=None):
        super().__init__(message)
        self.param = param


class InvariantError(AssertionError):
    """An internal consistency check failed; always a bug."""
