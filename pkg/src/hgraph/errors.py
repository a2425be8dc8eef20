"""Exception hierarchy shared by all hgraph modules."""

from __future__ import annotations


class HGraphError(Exception):
    """Base class for every error raised by hgraph."""


class GeometryError(HGraphError):
    pass


class CurvesCross(GeometryError):
    pass


class BadPinch(GeometryError):
    pass


class HypothesisViolated(GeometryError):
    """One of the three admissibility hypotheses on a clipped domain fails.

    ``which`` is 1 (connectedness), 2 (both vertical edges meet the
    boundary) or 3 (boundary avoids the horizontal edges).  The estimates
    module reuses the class with ``which = 0`` for boundary-data
    hypotheses of the transversal propositions.
    """

    def __init__(self, which: int, message: str = ""):
        self.which = which
        super().__init__(message or f"hypothesis {which} violated")


class BadPartition(GeometryError):
    pass


class NoGoodComponent(GeometryError):
    pass


class PathOutside(GeometryError):
    pass


class WitnessNotFound(GeometryError):
    pass


class ReductionFailed(GeometryError):
    pass


class BadRectangle(GeometryError):
    pass


class DegenerateCell(HGraphError):
    pass


class PointOutside(HGraphError):
    pass


class SolverError(HGraphError):
    """Raised when the Newton iteration cannot produce a solution."""


class NoConvergence(SolverError):
    def __init__(self, iterations: int, grad_norm: float = float("nan")):
        self.iterations = iterations
        self.grad_norm = grad_norm
        super().__init__(
            f"no convergence after {iterations} iterations "
            f"(relative gradient norm {grad_norm:.3e})"
        )


class GradientBlowup(SolverError):
    def __init__(self, iterations: int, slope: float):
        self.iterations = iterations
        self.slope = slope
        super().__init__(
            f"triangle slope {slope:.3e} exceeded the cap at iteration {iterations}"
        )


class BadRadius(HGraphError):
    pass


class BadWidth(HGraphError):
    pass


class NoContact(HGraphError):
    pass


class WindowOutside(HGraphError):
    pass


class ConfigError(HGraphError):
    pass
