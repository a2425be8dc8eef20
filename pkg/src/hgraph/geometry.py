"""Boundary-component machinery of a domain clipped by a rectangle.

Everything here works on polygonal regions: a :class:`PlanarDomain` is
converted with :meth:`PlanarDomain.polygon`, and any shapely ``Polygon``
(holes allowed) is accepted as well, which is what the randomized
property tests and the finite-element estimates feed in.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum, IntEnum
from typing import Mapping, Sequence

import numpy as np
from shapely.geometry import LineString, MultiPolygon, Point, Polygon
from shapely.geometry.base import BaseGeometry

from .domain import PlanarDomain, Rectangle
from .errors import (
    BadPartition,
    GeometryError,
    HypothesisViolated,
    NoGoodComponent,
    PathOutside,
    ReductionFailed,
    WitnessNotFound,
)


class Kind(Enum):
    LOOP = "loop"
    ARC = "arc"


class Label(IntEnum):
    UNASSIGNED = 0
    LAMBDA1 = 1
    LAMBDA2 = 2


EDGES = ("left", "right", "bottom", "top")


def as_polygon(region) -> Polygon | MultiPolygon:
    """Shapely view of a domain; a MultiPolygon is passed through so that
    a disconnected clip is reported as a hypothesis failure."""
    if isinstance(region, PlanarDomain):
        return region.polygon()
    if isinstance(region, (Polygon, MultiPolygon)):
        return region
    raise TypeError(f"cannot interpret {type(region).__name__} as a planar region")


def polygon_parts(geom: BaseGeometry, min_area: float = 0.0) -> list[Polygon]:
    if geom.is_empty:
        return []
    if isinstance(geom, Polygon):
        return [geom] if geom.area > min_area else []
    parts = []
    for g in getattr(geom, "geoms", []):
        parts.extend(polygon_parts(g, min_area))
    return parts


def point_segment_distance(p, a, b):
    """Distance from points ``p`` to segments ``[a, b]`` (broadcasting)."""
    p, a, b = np.asarray(p, float), np.asarray(a, float), np.asarray(b, float)
    ab = b - a
    ap = p - a
    denom = np.einsum("...i,...i->...", ab, ab)
    t = np.where(denom > 0, np.einsum("...i,...i->...", ap, ab) / np.where(denom > 0, denom, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    closest = a + t[..., None] * ab
    return np.linalg.norm(p - closest, axis=-1)


def point_polyline_distance(p, polyline: np.ndarray) -> float:
    pts = np.asarray(polyline, float)
    if len(pts) == 1:
        return float(np.linalg.norm(np.asarray(p, float) - pts[0]))
    return float(point_segment_distance(p, pts[:-1], pts[1:]).min())


def _edges_of(p, rect: Rectangle, tol: float) -> frozenset:
    x, y = p
    found = set()
    in_y = rect.y_min - tol <= y <= rect.y_max + tol
    in_x = rect.x_min - tol <= x <= rect.x_max + tol
    if in_y and abs(x - rect.x_min) <= tol:
        found.add("left")
    if in_y and abs(x - rect.x_max) <= tol:
        found.add("right")
    if in_x and abs(y - rect.y_min) <= tol:
        found.add("bottom")
    if in_x and abs(y - rect.y_max) <= tol:
        found.add("top")
    return frozenset(found)


@dataclass(frozen=True, eq=False)
class BoundaryComponent:
    polyline: np.ndarray
    kind: Kind
    attachments: tuple[frozenset, frozenset] | None = None
    label: Label = Label.UNASSIGNED

    @property
    def is_crossing(self) -> bool:
        """True for an arc joining the left edge to the right edge."""
        if self.kind is not Kind.ARC:
            return False
        s, e = self.attachments
        return ("left" in s and "right" in e) or ("right" in s and "left" in e)

    def endpoint_on(self, edge: str) -> np.ndarray:
        s, e = self.attachments
        if edge in s:
            return self.polyline[0]
        if edge in e:
            return self.polyline[-1]
        raise GeometryError(f"component has no endpoint on the {edge} edge")

    def representative_point(self) -> np.ndarray:
        pts = self.polyline
        k = (len(pts) - 1) // 2
        return 0.5 * (pts[k] + pts[k + 1])

    def distance_to(self, p) -> float:
        return point_polyline_distance(p, self.polyline)


@dataclass(frozen=True, eq=False)
class LambdaDecomposition:
    components: tuple[BoundaryComponent, ...]
    gamma1_index: int
    gamma2_index: int
    delta1_seed: tuple[float, float]
    delta2_seed: tuple[float, float]
    rect: Rectangle
    region: Polygon

    @property
    def gamma1(self) -> BoundaryComponent:
        return self.components[self.gamma1_index]

    @property
    def gamma2(self) -> BoundaryComponent:
        return self.components[self.gamma2_index]

    @property
    def labels(self) -> tuple[Label, ...]:
        return tuple(c.label for c in self.components)

    def is_partitioned(self) -> bool:
        return all(c.label is not Label.UNASSIGNED for c in self.components)

    def gamma(self, label: Label) -> list[BoundaryComponent]:
        """The components making up Gamma_1 or Gamma_2."""
        return [c for c in self.components if c.label is label]

    def component_of(self, p, tol: float | None = None) -> int:
        tol = self.rect.eps if tol is None else tol
        d = np.array([c.distance_to(p) for c in self.components])
        i = int(np.argmin(d))
        if d[i] > tol:
            raise GeometryError(
                f"point {tuple(p)} is {d[i]:.3e} away from every boundary component"
            )
        return i


def _split_ring(coords: np.ndarray, rect: Rectangle, tol: float) -> list[BoundaryComponent]:
    pts = np.asarray(coords, float)
    if len(pts) > 1 and np.allclose(pts[0], pts[-1]):
        pts = pts[:-1]
    n = len(pts)
    on = [_edges_of(p, rect, tol) for p in pts]
    if not any(on):
        return [BoundaryComponent(np.vstack((pts, pts[:1])), Kind.LOOP)]
    start = next(i for i in range(n) if on[i])
    order = [(start + k) % n for k in range(n)]
    pts = pts[order]
    on = [on[i] for i in order]

    arcs = []
    current = None
    for i in range(n):
        j = (i + 1) % n
        if on[i] and on[j] and on[i] & on[j]:
            # segment runs along a rectangle edge
            current = None
            continue
        if current is None:
            current = [i]
        current.append(j)
        if on[j]:
            poly = pts[current]
            arcs.append(
                BoundaryComponent(poly, Kind.ARC, (on[current[0]], on[current[-1]]))
            )
            current = None
    return arcs


def _check_hypotheses(poly: Polygon, rect: Rectangle) -> Polygon:
    tol = rect.eps
    clipped = polygon_parts(poly.intersection(rect.polygon()), min_area=tol * tol)
    if len(clipped) != 1:
        raise HypothesisViolated(1, f"clipped domain has {len(clipped)} components")
    omega = clipped[0]
    boundary = poly.boundary
    for side in ("left", "right"):
        meet = boundary.intersection(rect.edge(side))
        if meet.is_empty or meet.distance(omega) > tol:
            raise HypothesisViolated(2, f"boundary does not meet the {side} edge")
    for side in ("bottom", "top"):
        if omega.distance(rect.edge(side)) <= tol:
            raise HypothesisViolated(3, f"closure meets the {side} edge")
    return omega


def clip_decompose(domain, rect: Rectangle) -> LambdaDecomposition:
    """Split the boundary of the clipped domain inside the open rectangle.

    Returns every closed component (loops and arcs) and locates gamma_1 /
    gamma_2 as the crossing arcs bounding the complementary regions that
    contain the bottom and top edge midpoints.
    """
    poly = as_polygon(domain)
    omega = _check_hypotheses(poly, rect)
    tol = rect.eps

    comps: list[BoundaryComponent] = []
    for ring in (omega.exterior, *omega.interiors):
        comps.extend(_split_ring(np.asarray(ring.coords), rect, tol))

    crossing = [i for i, c in enumerate(comps) if c.is_crossing]
    if len(crossing) != 2:
        raise GeometryError(f"expected two crossing arcs, found {len(crossing)}")

    cx, cy = rect.center
    seed1 = (cx, rect.y_min)
    seed2 = (cx, rect.y_max)
    complement = polygon_parts(rect.polygon().difference(omega), min_area=tol * tol)

    def gamma_for(seed) -> int:
        delta = [d for d in complement if d.distance(Point(seed)) <= tol]
        if len(delta) != 1:
            raise GeometryError(f"cannot isolate the complementary region at {seed}")
        edge = delta[0].boundary
        hits = [i for i in crossing if edge.distance(Point(comps[i].representative_point())) <= tol]
        if len(hits) != 1:
            raise GeometryError(f"complementary region at {seed} borders {len(hits)} crossing arcs")
        return hits[0]

    g1, g2 = gamma_for(seed1), gamma_for(seed2)
    if g1 == g2:
        raise GeometryError("gamma_1 and gamma_2 coincide")
    return LambdaDecomposition(tuple(comps), g1, g2, seed1, seed2, rect, omega)


def partition_lambda(
    decomp: LambdaDecomposition, assignment: Mapping[int, Label | int] | Sequence[Label | int]
) -> LambdaDecomposition:
    if isinstance(assignment, Mapping):
        items = dict(assignment)
    else:
        items = dict(enumerate(assignment))
    labels = []
    for i in range(len(decomp.components)):
        if i not in items:
            raise BadPartition(f"component {i} is not assigned")
        lab = Label(int(items[i]))
        if lab is Label.UNASSIGNED:
            raise BadPartition(f"component {i} assigned to neither class")
        labels.append(lab)
    if labels[decomp.gamma1_index] is not Label.LAMBDA1:
        raise BadPartition("gamma_1 must belong to Lambda_1")
    if labels[decomp.gamma2_index] is not Label.LAMBDA2:
        raise BadPartition("gamma_2 must belong to Lambda_2")
    comps = tuple(replace(c, label=lab) for c, lab in zip(decomp.components, labels))
    return replace(decomp, components=comps)


def natural_partition(decomp: LambdaDecomposition) -> LambdaDecomposition:
    """gamma_1, gamma_2 in their own classes; every other component goes to
    the class whose crossing arc has the closer mean height."""
    y1 = decomp.gamma1.polyline[:, 1].mean()
    y2 = decomp.gamma2.polyline[:, 1].mean()
    assignment = {}
    for i, c in enumerate(decomp.components):
        if i == decomp.gamma1_index:
            assignment[i] = Label.LAMBDA1
        elif i == decomp.gamma2_index:
            assignment[i] = Label.LAMBDA2
        else:
            y = c.polyline[:, 1].mean()
            assignment[i] = Label.LAMBDA1 if abs(y - y1) <= abs(y - y2) else Label.LAMBDA2
    return partition_lambda(decomp, assignment)


@dataclass(frozen=True, eq=False)
class GoodComponent:
    region: Polygon
    decomposition: LambdaDecomposition

    @property
    def alpha(self) -> BoundaryComponent:
        return self.decomposition.gamma1

    @property
    def beta(self) -> BoundaryComponent:
        return self.decomposition.gamma2

    def key(self, arc: str = "alpha", side: str = "left") -> float:
        comp = self.alpha if arc == "alpha" else self.beta
        return float(comp.endpoint_on(side)[1])


def good_components(
    domain,
    rect: Rectangle,
    a_prime: float,
    H: float | None = None,
    partition: LambdaDecomposition | None = None,
) -> list[GoodComponent]:
    """Connected pieces of the domain inside the narrower rectangle that
    still satisfy the three hypotheses, with labels inherited from the
    parent partition and sorted by the height of gamma_alpha's left end."""
    if not (0 < a_prime < rect.a):
        raise ValueError(f"a_prime={a_prime} must lie in (0, a={rect.a})")
    if H is not None and not (1.0 / H < a_prime):
        raise ValueError(f"a_prime={a_prime} must exceed 1/H={1.0 / H}")
    parent = partition if partition is not None else natural_partition(clip_decompose(domain, rect))
    if not parent.is_partitioned():
        raise BadPartition("parent decomposition carries no partition")

    sub = rect.with_half_width(a_prime)
    tol = sub.eps
    pieces = polygon_parts(parent.region.intersection(sub.polygon()), min_area=tol * tol)
    goods = []
    for piece in pieces:
        try:
            dec = clip_decompose(piece, sub)
        except HypothesisViolated:
            continue
        labels = []
        for c in dec.components:
            owner = parent.component_of(c.representative_point(), tol=max(tol, parent.rect.eps))
            labels.append(parent.components[owner].label)
        comps = tuple(replace(c, label=lab) for c, lab in zip(dec.components, labels))
        goods.append(GoodComponent(piece, replace(dec, components=comps)))
    if not goods:
        raise NoGoodComponent("no component of the narrower clip satisfies the hypotheses")
    goods.sort(key=lambda g: g.key("alpha", "left"))
    return goods


@dataclass(frozen=True)
class ReductionReport:
    index: int  # 1-based position of the selected component
    component: GoodComponent
    good_count: int

    @property
    def partition(self) -> LambdaDecomposition:
        return self.component.decomposition


def replay_theorem1_reduction(
    domain,
    rect: Rectangle,
    a_prime: float,
    partition: LambdaDecomposition,
    H: float | None = None,
) -> ReductionReport:
    """Pick the first good component whose upper crossing arc lies in
    Lambda_2 and confirm its lower crossing arc lies in Lambda_1."""
    goods = good_components(domain, rect, a_prime, H=H, partition=partition)
    i0 = next((i for i, g in enumerate(goods) if g.beta.label is Label.LAMBDA2), None)
    if i0 is None:
        raise ReductionFailed("no good component has gamma_beta in Lambda_2")
    if goods[i0].alpha.label is not Label.LAMBDA1:
        raise ReductionFailed(f"component {i0 + 1} has gamma_alpha outside Lambda_1")
    return ReductionReport(i0 + 1, goods[i0], len(goods))


@dataclass(frozen=True, eq=False)
class PathTrace:
    path: np.ndarray
    intervals: tuple[tuple[float, float], ...]
    component_at_entry: tuple[int, ...]
    component_at_exit: tuple[int, ...]

    @property
    def j_min(self) -> int:
        return 0

    @property
    def j_max(self) -> int:
        return len(self.intervals) - 1

    def point(self, t: float) -> np.ndarray:
        seg = np.linalg.norm(np.diff(self.path, axis=0), axis=1)
        s = np.concatenate(([0.0], np.cumsum(seg))) / seg.sum()
        return np.array([np.interp(t, s, self.path[:, 0]), np.interp(t, s, self.path[:, 1])])


def _segment_pieces(a, b, region: Polygon) -> list[tuple[float, float]]:
    ab = b - a
    L2 = float(ab @ ab)
    inter = LineString([a, b]).intersection(region)
    out = []

    def param(q):
        return float(np.clip((np.asarray(q) - a) @ ab / L2, 0.0, 1.0))

    stack = [inter]
    while stack:
        g = stack.pop()
        if g.is_empty:
            continue
        if g.geom_type == "Point":
            t = param(g.coords[0])
            out.append((t, t))
        elif g.geom_type == "LineString":
            ts = [param(q) for q in g.coords]
            out.append((min(ts), max(ts)))
        else:
            stack.extend(g.geoms)
    return out


def trace_path(c, domain, rect: Rectangle, decomp: LambdaDecomposition | None = None) -> PathTrace:
    """Intervals of [0, 1] on which the (arc-length parametrized) path lies
    in the closure of the clipped domain, in their natural order."""
    path = np.asarray(c, float).reshape(-1, 2)
    tol = rect.eps
    if len(path) < 2:
        raise PathOutside("a path needs at least two vertices")
    if "bottom" not in _edges_of(path[0], rect, tol) or "top" not in _edges_of(path[-1], rect, tol):
        raise PathOutside("path must start on the bottom edge and end on the top edge")
    inner = path[1:-1]
    if len(inner) and not np.all(
        (inner[:, 0] > rect.x_min + tol) & (inner[:, 0] < rect.x_max - tol)
        & (inner[:, 1] > rect.y_min + tol) & (inner[:, 1] < rect.y_max - tol)
    ):
        raise PathOutside("interior vertices of the path must lie in the open rectangle")
    if decomp is None:
        decomp = clip_decompose(domain, rect)
    region = decomp.region

    seg_len = np.linalg.norm(np.diff(path, axis=0), axis=1)
    if np.any(seg_len == 0):
        raise PathOutside("path has repeated vertices")
    s = np.concatenate(([0.0], np.cumsum(seg_len)))
    total = s[-1]
    raw = []
    for k in range(len(path) - 1):
        for t0, t1 in _segment_pieces(path[k], path[k + 1], region):
            raw.append(((s[k] + t0 * seg_len[k]) / total, (s[k] + t1 * seg_len[k]) / total))
    raw.sort()
    merged: list[list[float]] = []
    ptol = 1e-12
    for e, o in raw:
        if merged and e <= merged[-1][1] + ptol:
            merged[-1][1] = max(merged[-1][1], o)
        else:
            merged.append([e, o])

    trace = PathTrace(path, tuple((e, o) for e, o in merged), (), ())
    entry = tuple(decomp.component_of(trace.point(e), tol=100 * tol) for e, _ in merged)
    exit_ = tuple(decomp.component_of(trace.point(o), tol=100 * tol) for _, o in merged)
    return replace(trace, component_at_entry=entry, component_at_exit=exit_)


def precedes(trace: PathTrace, i: int, j: int) -> bool:
    """The strict order on intervals: o_i < e_j."""
    return trace.intervals[i][1] < trace.intervals[j][0]


def lemma1_witness(trace: PathTrace, decomp: LambdaDecomposition, j: int, j_prev: int) -> int:
    """Find j'' with j_prev <= j'' < j whose exit point lies on the same
    boundary component as the entry point of interval j."""
    if j == trace.j_min:
        raise ValueError("j must differ from the minimal interval")
    if not precedes(trace, j_prev, j):
        raise ValueError("j_prev must strictly precede j")
    tol = 100 * decomp.rect.eps
    target = decomp.component_of(trace.point(trace.intervals[j][0]), tol=tol)
    for k in range(j - 1, j_prev - 1, -1):
        if decomp.component_of(trace.point(trace.intervals[k][1]), tol=tol) == target:
            return k
    raise WitnessNotFound(f"no interval in [{j_prev}, {j}) exits on component {target}")
