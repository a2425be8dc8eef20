"""Profile-plane images F(x, y) = (x, u(x, y)) and their separation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import BoundaryComponent, point_segment_distance


@dataclass(frozen=True, eq=False)
class ProfileCurve:
    points: np.ndarray  # (k, 2) rows of (x, z)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).reshape(-1, 2)
        if len(pts) == 0:
            raise ValueError("profile curve must be non-empty")
        if not np.all(np.isfinite(pts)):
            raise ValueError("profile curve has non-finite points")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def segments(self) -> tuple[np.ndarray, np.ndarray]:
        p = self.points
        if len(p) == 1:
            return p, p
        return p[:-1], p[1:]


def _edge_crossings(a: np.ndarray, b: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """Parameters s in (0, 1) where segment a-b properly crosses mesh edges."""
    p, q = edges[:, 0], edges[:, 1]
    d = b - a
    e = q - p
    denom = d[0] * e[:, 1] - d[1] * e[:, 0]
    ok = np.abs(denom) > 1e-300
    ap = p - a
    s = np.where(ok, (ap[:, 0] * e[:, 1] - ap[:, 1] * e[:, 0]) / np.where(ok, denom, 1), -1)
    t = np.where(ok, (ap[:, 0] * d[1] - ap[:, 1] * d[0]) / np.where(ok, denom, 1), -1)
    hit = ok & (s > 1e-12) & (s < 1 - 1e-12) & (t >= 0) & (t <= 1)
    return np.unique(s[hit])


def profile_project(solution, component: BoundaryComponent) -> ProfileCurve:
    """F-image of a boundary component, sampled at its vertices and at
    every crossing with a mesh edge (exact for a P1 field)."""
    from .solver import interpolate_many

    mesh = solution.mesh
    edges = mesh.vertices[mesh.edges]
    poly = np.asarray(component.polyline, float)
    samples = [poly[:1]]
    for a, b in zip(poly[:-1], poly[1:]):
        lo = np.minimum(a, b)
        hi = np.maximum(a, b)
        near = (
            (edges[:, :, 0].max(axis=1) >= lo[0]) & (edges[:, :, 0].min(axis=1) <= hi[0])
            & (edges[:, :, 1].max(axis=1) >= lo[1]) & (edges[:, :, 1].min(axis=1) <= hi[1])
        )
        s = _edge_crossings(a, b, edges[near])
        samples.append(a + s[:, None] * (b - a))
        samples.append(b[None])
    pts = np.vstack(samples)
    z = interpolate_many(solution, pts)
    return ProfileCurve(np.column_stack((pts[:, 0], z)))


def _orient(a, b, c):
    return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])


def segment_distances(a0, a1, b0, b1) -> np.ndarray:
    """Pairwise distances between segments [a0, a1] (n) and [b0, b1] (m)."""
    A0, A1 = a0[:, None, :], a1[:, None, :]
    B0, B1 = b0[None, :, :], b1[None, :, :]
    d = np.minimum.reduce(
        [
            point_segment_distance(A0, B0, B1),
            point_segment_distance(A1, B0, B1),
            point_segment_distance(B0, A0, A1),
            point_segment_distance(B1, A0, A1),
        ]
    )
    o1, o2 = _orient(A0, A1, B0), _orient(A0, A1, B1)
    o3, o4 = _orient(B0, B1, A0), _orient(B0, B1, A1)
    crossing = (o1 * o2 < 0) & (o3 * o4 < 0)
    return np.where(crossing, 0.0, d)


def _as_curves(x) -> list[ProfileCurve]:
    if isinstance(x, ProfileCurve):
        return [x]
    return list(x)


def closest_pair(A, B, chunk: int = 2048) -> tuple[float, np.ndarray, np.ndarray]:
    """Minimal distance between two unions of polylines and a witness pair."""
    A, B = _as_curves(A), _as_curves(B)
    if not A or not B:
        raise ValueError("both sides need at least one curve")
    a0, a1 = (np.vstack(s) for s in zip(*(c.segments() for c in A)))
    b0, b1 = (np.vstack(s) for s in zip(*(c.segments() for c in B)))
    best = (np.inf, 0, 0)
    for start in range(0, len(a0), chunk):
        d = segment_distances(a0[start:start + chunk], a1[start:start + chunk], b0, b1)
        k = int(np.argmin(d))
        i, j = divmod(k, d.shape[1])
        if d[i, j] < best[0]:
            best = (float(d[i, j]), start + i, j)
    dist, i, j = best
    pa, pb = _closest_points(a0[i], a1[i], b0[j], b1[j])
    return dist, pa, pb


def _closest_points(a0, a1, b0, b1):
    # dense candidate set is enough for a witness; the distance itself is exact
    cands = []
    for p, (s0, s1) in ((a0, (b0, b1)), (a1, (b0, b1))):
        cands.append((p, _project(p, s0, s1)))
    for p, (s0, s1) in ((b0, (a0, a1)), (b1, (a0, a1))):
        cands.append((_project(p, s0, s1), p))
    pa, pb = min(cands, key=lambda c: np.linalg.norm(c[0] - c[1]))
    if _orient(a0, a1, b0) * _orient(a0, a1, b1) < 0 and _orient(b0, b1, a0) * _orient(b0, b1, a1) < 0:
        da = a1 - a0
        db = b1 - b0
        t = ((b0[0] - a0[0]) * db[1] - (b0[1] - a0[1]) * db[0]) / (da[0] * db[1] - da[1] * db[0])
        pa = pb = a0 + t * da
    return np.asarray(pa, float), np.asarray(pb, float)


def _project(p, s0, s1):
    d = s1 - s0
    L2 = float(d @ d)
    if L2 == 0:
        return s0
    t = np.clip((p - s0) @ d / L2, 0.0, 1.0)
    return s0 + t * d


def set_distance(A: ProfileCurve | Sequence[ProfileCurve], B: ProfileCurve | Sequence[ProfileCurve]) -> float:
    """min over segment pairs of the segment-segment distance; 0 exactly
    when the curves intersect."""
    return closest_pair(A, B)[0]
