"""Exception types shared across the package."""


class CutmError(Exception):
    """Base class for all package errors."""


class ParseError(CutmError):
    """Input file is malformed (bad JSON, missing or mistyped fields)."""


class ValidationError(CutmError):
    """A structural invariant of an input is violated."""


class DegenerateBoundaryError(CutmError):
    """Floor boundary anchors collapse; the boundary interpolant is undefined."""


class ObstacleNotOnFloorError(CutmError):
    """Obstacle does not intersect the requested floor."""


class GeometryError(CutmError):
    """Geometric construction failed (e.g. inconsistent boundary crossings)."""


class NonConvergenceError(CutmError):
    """Laplace solve hit the iteration cap before reaching tolerance."""

    def __init__(self, residual: float, iterations: int, tolerance: float):
        self.residual = residual
        self.iterations = iterations
        self.tolerance = tolerance
        super().__init__(
            f"solver stopped after {iterations} iterations with residual "
            f"{residual:.3e} > tolerance {tolerance:.3e}"
        )


class UnconvergedFieldError(CutmError):
    """Streamline extraction was handed an unconverged stream field."""


class NoStreamlinesError(CutmError):
    """Fewer than two skyroads survive the minimum-bandwidth constraint."""


class EdgeNotLiveError(CutmError):
    """Transition queried between segments that are not connected in the live edge set."""


class StartOrGoalAllocatedError(CutmError):
    """Path query endpoints are not both in the accessible segment set."""


class ScenarioError(CutmError):
    """Scenario is inconsistent with itself or with the graph it targets."""


class DigestMismatchError(CutmError):
    """Trace was produced from a different graph than the one supplied."""


class RangeError(CutmError):
    """Requested step lies outside the recorded trace."""
