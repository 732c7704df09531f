"""Package-wide exception types."""


class BslabError(Exception):
    """Base class for all package errors."""


class ComplianceError(BslabError):
    """An explicit-solution existence condition fails; the message names it."""


class GridCompatibilityError(BslabError):
    """A flow is not periodic on the verification torus (non-integer modes)."""


class SimulationDiverged(BslabError):
    def __init__(self, time, norm):
        super().__init__(f"simulation diverged at t = {time:.6g} (norm {norm:.3e})")
        self.time = time
        self.norm = norm


class DepthViolation(BslabError):
    """The reduced dynamics produced a non-positive total fluid depth."""


class VerticalBranch(BslabError):
    """Q = 0, f = 0: the bifurcating branch is vertical, amplitude undetermined
    at leading order."""


class ConvergenceError(BslabError):
    """An iterative solver failed to converge."""


class RangeError(BslabError, ValueError):
    """A parameter lies outside the validity range of the requested analysis."""
