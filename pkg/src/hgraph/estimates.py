"""Height estimates evaluated as numeric inequalities on a discrete solution.

Every check returns an :class:`EstimateReport` whose ``passed`` flag is
``measured <= bound + slack``.  Lower bounds are reported negated so that
the same predicate applies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import PlanarDomain, Rectangle
from .errors import BadRectangle, HypothesisViolated, WindowOutside
from .geometry import (
    Label,
    LambdaDecomposition,
    clip_decompose,
    natural_partition,
    partition_lambda,
    replay_theorem1_reduction,
)
from .profile import _edge_crossings, closest_pair, profile_project
from .reports import EstimateReport
from .solver import BoundaryData, Solution, interpolate_many

UNIFORM_SAMPLES = 64
_XTOL = 1e-12


@dataclass(frozen=True, eq=False)
class Transversal:
    """Vertical segment {x0} x [b_minus(x0), b_plus(x0)] with the discrete
    solution sampled at every mesh-edge crossing and at 64 uniform points."""

    x0: float
    segment: tuple[float, float]
    points: np.ndarray
    samples: np.ndarray

    @classmethod
    def of(cls, solution: Solution, x0: float) -> "Transversal":
        geom = solution.mesh.geometry
        if not isinstance(geom, PlanarDomain):
            raise TypeError("transversals need a strip mesh")
        if not (geom.x_lo - _XTOL <= x0 <= geom.x_hi + _XTOL):
            raise WindowOutside(f"x0={x0} is outside [{geom.x_lo}, {geom.x_hi}]")
        x0 = float(np.clip(x0, geom.x_lo, geom.x_hi))
        lo, hi = float(geom.b_minus(x0)), float(geom.b_plus(x0))
        a, b = np.array([x0, lo]), np.array([x0, hi])
        mesh = solution.mesh
        s = np.linspace(0.0, 1.0, UNIFORM_SAMPLES)
        if hi > lo:
            s = np.union1d(s, _edge_crossings(a, b, mesh.vertices[mesh.edges]))
        pts = a + s[:, None] * (b - a)
        pts.setflags(write=False)
        vals = interpolate_many(solution, pts)
        vals.setflags(write=False)
        return cls(x0, (lo, hi), pts, vals)

    def argmax(self) -> tuple[float, float, float]:
        k = int(np.argmax(self.samples))
        return (*map(float, self.points[k]), float(self.samples[k]))

    def argmin(self) -> tuple[float, float, float]:
        k = int(np.argmin(self.samples))
        return (*map(float, self.points[k]), float(self.samples[k]))

    @property
    def oscillation(self) -> float:
        return float(np.ptp(self.samples))


@dataclass(frozen=True)
class VariationStats:
    x0: float
    t: float
    v_minus: float
    v_plus: float

    @property
    def v_pair(self) -> float:
        return max(self.v_minus, self.v_plus)


def _window(data: BoundaryData, x0: float, t: float) -> tuple[float, float]:
    lo, hi = x0 - t, x0 + t
    for f in (data.f_minus, data.f_plus):
        if not f.covers(lo, hi):
            raise WindowOutside(f"window [{lo}, {hi}] is not inside [{f.lo}, {f.hi}]")
    return lo, hi


def variation(data: BoundaryData, x0: float, t: float) -> VariationStats:
    """sup - inf of each boundary function over [x0 - t, x0 + t]."""
    if t < 0:
        raise ValueError("window radius must be non-negative")
    lo, hi = _window(data, x0, t)
    m1, M1 = data.f_minus.extrema(lo, hi)
    m2, M2 = data.f_plus.extrema(lo, hi)
    return VariationStats(float(x0), float(t), float(M1 - m1), float(M2 - m2))


def slack_allowance(solution: Solution) -> float:
    return 10.0 * solution.h_max + 10.0 * solution.grad_norm


def _data_extrema(solution: Solution, x0: float, t: float) -> tuple[float, float]:
    data = solution.traces()
    lo, hi = _window(data, x0, t)
    m1, M1 = data.f_minus.extrema(lo, hi)
    m2, M2 = data.f_plus.extrema(lo, hi)
    return min(m1, m2), max(M1, M2)


# -- profile-distance estimates ---------------------------------------------


def _partitioned(solution: Solution, rect: Rectangle, partition) -> LambdaDecomposition:
    if isinstance(partition, LambdaDecomposition):
        if not partition.is_partitioned():
            raise ValueError("decomposition carries no partition")
        return partition
    decomp = clip_decompose(solution.mesh.polygon, rect)
    if partition is None:
        return natural_partition(decomp)
    return partition_lambda(decomp, partition)


def profile_distance(solution: Solution, decomp: LambdaDecomposition):
    """Distance between the profile images of Gamma_1 and Gamma_2, with a
    witness pair of profile-plane points."""
    g1 = [profile_project(solution, c) for c in decomp.gamma(Label.LAMBDA1)]
    g2 = [profile_project(solution, c) for c in decomp.gamma(Label.LAMBDA2)]
    return closest_pair(g1, g2)


def _distance_report(name, solution, decomp, bound) -> EstimateReport:
    dist, pa, pb = profile_distance(solution, decomp)
    return EstimateReport(
        name, dist, bound, slack_allowance(solution),
        (tuple(map(float, pa)), tuple(map(float, pb))), decomp.rect.center[0],
    )


def check_theorem2prime(solution: Solution, rect: Rectangle, partition=None) -> EstimateReport:
    """Profile images of the two boundary classes lie within 2a."""
    decomp = _partitioned(solution, rect, partition)
    return _distance_report("profile_distance_2a", solution, decomp, 2.0 * rect.a)


def check_theorem1(solution: Solution, rect: Rectangle, partition=None) -> EstimateReport:
    """Profile images of the two boundary classes lie within 2/H (a > 1/H)."""
    if not rect.a > 1.0 / solution.H:
        raise BadRectangle(f"a={rect.a} must exceed 1/H={1.0 / solution.H}")
    decomp = _partitioned(solution, rect, partition)
    return _distance_report("profile_distance_2_over_H", solution, decomp, 2.0 / solution.H)


# -- transversal estimates --------------------------------------------------


def check_prop_min(solution: Solution, x0: float, M: float) -> EstimateReport:
    """Boundary data >= M on the 2/H window keeps u >= M - 3/H on I_x0."""
    H = solution.H
    low, _ = _data_extrema(solution, x0, 2.0 / H)
    if low < M:
        raise HypothesisViolated(0, f"boundary data drop to {low} < M = {M} on the window")
    tr = Transversal.of(solution, x0)
    w = tr.argmin()
    return EstimateReport("transversal_min", -w[2], -(M - 3.0 / H), slack_allowance(solution), (w,), x0)


def check_prop_max(solution: Solution, x0: float, M: float) -> EstimateReport:
    """Boundary data <= M on the 1/(2H) window keeps u <= M on I_x0."""
    _, high = _data_extrema(solution, x0, 0.5 / solution.H)
    if high > M:
        raise HypothesisViolated(0, f"boundary data reach {high} > M = {M} on the window")
    tr = Transversal.of(solution, x0)
    w = tr.argmax()
    return EstimateReport("transversal_max", w[2], M, slack_allowance(solution), (w,), x0)


def _oscillation_bound(solution: Solution, x0: float) -> tuple[float, float]:
    H = solution.H
    M = variation(solution.traces(), x0, 2.0 / H).v_pair
    return M, 4.0 * M + 5.0 / H


def check_theorem3(solution: Solution, x0: float) -> EstimateReport:
    """Oscillation on I_x0 is at most 4M + 5/H, M the pair variation."""
    _, bound = _oscillation_bound(solution, x0)
    tr = Transversal.of(solution, x0)
    return EstimateReport(
        "oscillation", tr.oscillation, bound, slack_allowance(solution), (tr.argmax(), tr.argmin()), x0
    )


def check_boundary_gap(solution: Solution, x0: float) -> EstimateReport:
    """|f_minus(x0) - f_plus(x0)| <= 2(M + 1/H)."""
    M, _ = _oscillation_bound(solution, x0)
    data = solution.traces()
    geom = solution.mesh.geometry
    fm, fp = float(data.f_minus(x0)), float(data.f_plus(x0))
    witnesses = ((x0, float(geom.b_minus(x0)), fm), (x0, float(geom.b_plus(x0)), fp))
    return EstimateReport(
        "boundary_gap", abs(fm - fp), 2.0 * (M + 1.0 / solution.H), slack_allowance(solution), witnesses, x0
    )


def check_corollary(solution: Solution, x0: float) -> EstimateReport:
    """Every value on I_x0 lies within 4M + 5/H of both f_minus(x0) and f_plus(x0)."""
    _, bound = _oscillation_bound(solution, x0)
    data = solution.traces()
    tr = Transversal.of(solution, x0)
    best, wit = -np.inf, None
    for f in (data.f_minus, data.f_plus):
        dev = np.abs(tr.samples - float(f(x0)))
        k = int(np.argmax(dev))
        if dev[k] > best:
            best = float(dev[k])
            wit = (*map(float, tr.points[k]), float(tr.samples[k]))
    return EstimateReport("deviation", best, bound, slack_allowance(solution), (wit,), x0)


def check_classical_bounds(solution: Solution) -> tuple[EstimateReport, EstimateReport]:
    """Maximum principle (no interior maximum) and the 1/H dip below the
    boundary minimum."""
    u = solution.u
    bnd = solution.boundary_values()
    h = solution.h_max
    vmax, vmin = solution.mesh.vertices[np.argmax(u)], solution.mesh.vertices[np.argmin(u)]
    upper = EstimateReport(
        "max_principle", float(u.max()), float(bnd.max()), 10.0 * h * h,
        ((float(vmax[0]), float(vmax[1]), float(u.max())),),
    )
    lower = EstimateReport(
        "height_below_boundary", -float(u.min()), -(float(bnd.min()) - 1.0 / solution.H), 10.0 * h,
        ((float(vmin[0]), float(vmin[1]), float(u.min())),),
    )
    return upper, lower


def run_checks(solution: Solution, x0: float, rect: Rectangle | None = None) -> list[EstimateReport]:
    """Every transversal check applicable at x0, plus the profile-distance
    checks when a rectangle is given.  Checks whose window leaves the
    domain are skipped."""
    reports = []
    H = solution.H
    for fn in (check_theorem3, check_boundary_gap, check_corollary):
        try:
            reports.append(fn(solution, x0))
        except WindowOutside:
            pass
    try:
        low, _ = _data_extrema(solution, x0, 2.0 / H)
        reports.append(check_prop_min(solution, x0, low))
    except WindowOutside:
        pass
    try:
        _, high = _data_extrema(solution, x0, 0.5 / H)
        reports.append(check_prop_max(solution, x0, high))
    except WindowOutside:
        pass
    if rect is not None:
        decomp = _partitioned(solution, rect, None)
        reports.append(_distance_report("profile_distance_2a", solution, decomp, 2.0 * rect.a))
        if rect.a > 1.0 / H:
            reports.append(_distance_report("profile_distance_2_over_H", solution, decomp, 2.0 / H))
    return reports


__all__ = [
    "Transversal",
    "VariationStats",
    "EstimateReport",
    "variation",
    "slack_allowance",
    "profile_distance",
    "check_theorem2prime",
    "check_theorem1",
    "check_prop_min",
    "check_prop_max",
    "check_theorem3",
    "check_boundary_gap",
    "check_corollary",
    "check_classical_bounds",
    "run_checks",
    "replay_theorem1_reduction",
]
