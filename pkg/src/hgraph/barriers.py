"""Sliding comparison surfaces and first-contact detection.

A barrier moves along a one-parameter family of positions.  The region
it has swept between the start of the range and parameter ``s`` is a
capsule (a segment of centres thickened by the radius), so the signed
distance from the graph samples to the swept region is monotone in
``s`` and the first contact is found by bisection.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import HypothesisViolated, NoContact, WindowOutside
from .geometry import point_segment_distance
from .mesh import Tag
from .reports import EstimateReport
from .solver import Solution, interpolate


class Side(Enum):
    ABOVE = "above"
    BELOW = "below"
    ON = "on"


@dataclass(frozen=True)
class SphereBarrier:
    """Ball of the given radius centred at ``origin + s * direction``."""

    radius: float
    origin: tuple[float, float, float]
    direction: tuple[float, float, float] = (0.0, 1.0, 0.0)

    def center(self, s: float) -> np.ndarray:
        return np.asarray(self.origin, float) + s * np.asarray(self.direction, float)

    def swept_gap(self, pts: np.ndarray, s0: float, s: float) -> np.ndarray:
        c0, c1 = self.center(s0), self.center(s)
        return point_segment_distance(pts, c0, c1) - self.radius


@dataclass(frozen=True)
class CylinderBarrier:
    """Solid cylinder along the y direction with axis {x = x0, z = t}."""

    radius: float
    x0: float

    def center(self, t: float) -> np.ndarray:
        return np.array([self.x0, 0.0, t])

    def swept_gap(self, pts: np.ndarray, t0: float, t: float) -> np.ndarray:
        xz = pts[:, [0, 2]]
        return point_segment_distance(xz, np.array([self.x0, t0]), np.array([self.x0, t])) - self.radius


def sphere_barrier(H: float, x_c: float, z_c: float) -> SphereBarrier:
    """Sphere of radius 1/H sliding along y at fixed (x, z) = (x_c, z_c)."""
    return SphereBarrier(1.0 / H, (x_c, 0.0, z_c), (0.0, 1.0, 0.0))


def cylinder_barrier(H: float, x0: float) -> CylinderBarrier:
    return CylinderBarrier(1.0 / (2.0 * H), x0)


@dataclass(frozen=True)
class ContactReport:
    parameter: float
    point: tuple[float, float, float]
    side: Side
    touched_boundary: bool

    def to_dict(self) -> dict:
        return {
            "parameter": float(self.parameter),
            "point": [float(v) for v in self.point],
            "side": self.side.value,
            "touched_boundary": bool(self.touched_boundary),
        }


def graph_samples(solution: Solution) -> tuple[np.ndarray, np.ndarray]:
    """Graph points over mesh vertices and triangle centroids, with a flag
    marking boundary vertices."""
    mesh = solution.mesh
    v = np.column_stack((mesh.vertices, solution.u))
    c = v[mesh.triangles].mean(axis=1)
    on_bnd = np.concatenate((mesh.tags != Tag.INTERIOR, np.zeros(mesh.n_triangles, dtype=bool)))
    return np.vstack((v, c)), on_bnd


def _scale(solution: Solution) -> float:
    v = solution.mesh.vertices
    span = np.ptp(v, axis=0)
    return float(max(np.hypot(*span), np.ptp(solution.u), 1.0))


def first_contact(solution: Solution, barrier, range_: tuple[float, float]) -> ContactReport | None:
    """First parameter in ``range_`` (ordered in the direction of motion)
    at which the barrier touches the graph; None when it never does."""
    s0, s1 = float(range_[0]), float(range_[1])
    pts, on_bnd = graph_samples(solution)
    if np.min(barrier.swept_gap(pts, s0, s0)) <= 0:
        raise ValueError("barrier already meets the graph at the start of the range")
    if np.min(barrier.swept_gap(pts, s0, s1)) > 0:
        return None
    tol = 1e-10 * max(_scale(solution), abs(s1 - s0))
    lo, hi = s0, s1
    while abs(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        if np.min(barrier.swept_gap(pts, s0, mid)) > 0:
            lo = mid
        else:
            hi = mid
    gaps = barrier.swept_gap(pts, s0, hi)
    k = int(np.argmin(gaps))
    p = pts[k]
    side = Side.ABOVE if p[2] < barrier.center(hi)[2] else Side.BELOW
    return ContactReport(hi, (float(p[0]), float(p[1]), float(p[2])), side, bool(on_bnd[k]))


def classify_side(solution: Solution, p) -> Side:
    x, y, z = (float(v) for v in p)
    u = interpolate(solution, (x, y))
    tol = 1e-10 * _scale(solution)
    if z - u > tol:
        return Side.ABOVE
    if u - z > tol:
        return Side.BELOW
    return Side.ON


def cylinder_descent_bound(solution: Solution, x0: float, M: float) -> tuple[EstimateReport, ContactReport]:
    """Lower a cylinder of radius 1/(2H) over x0 and check it cannot touch
    the graph while its axis is above M + 1/(2H)."""
    H = solution.H
    r = 1.0 / (2.0 * H)
    traces = solution.traces()
    lo, hi = x0 - r, x0 + r
    dom_lo = max(traces.f_minus.lo, traces.f_plus.lo)
    dom_hi = min(traces.f_minus.hi, traces.f_plus.hi)
    if lo < dom_lo - 1e-12 or hi > dom_hi + 1e-12:
        raise WindowOutside(f"window [{lo}, {hi}] leaves the domain")
    top = max(traces.f_minus.extrema(lo, hi)[1], traces.f_plus.extrema(lo, hi)[1])
    if top > M:
        raise HypothesisViolated(0, f"boundary data reach {top} > M = {M} on the window")

    start = float(np.max(solution.u)) + r + 1.0
    end = float(np.min(solution.u)) - r - 1.0
    contact = first_contact(solution, cylinder_barrier(H, x0), (start, end))
    if contact is None:
        raise NoContact(f"cylinder over x0={x0} never touches the graph")
    slack = 2.0 * solution.h_max ** 2 + 1e-10 * _scale(solution)
    report = EstimateReport(
        "cylinder_descent", contact.parameter, M + r, slack, (contact.point,), x0
    )
    return report, contact
