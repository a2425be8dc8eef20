"""Structured P1 triangulations of generalized strips and disks."""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from functools import cached_property
from pathlib import Path

import numpy as np
from shapely.geometry import Polygon

from .domain import PINCH_TOL, PlanarDomain
from .errors import DegenerateCell


class Tag(IntEnum):
    INTERIOR = 0
    LOWER_CURVE = 1
    UPPER_CURVE = 2
    LEFT_CAP = 3
    RIGHT_CAP = 4
    DISK_RIM = 5


TAG_NAMES = {
    Tag.INTERIOR: "Interior",
    Tag.LOWER_CURVE: "LowerCurve",
    Tag.UPPER_CURVE: "UpperCurve",
    Tag.LEFT_CAP: "LeftCap",
    Tag.RIGHT_CAP: "RightCap",
    Tag.DISK_RIM: "DiskRim",
}
TAG_BY_NAME = {v: k for k, v in TAG_NAMES.items()}


@dataclass(frozen=True)
class Disk:
    """Disk of radius R centred at the origin."""

    R: float


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TriangleMesh:
    vertices: np.ndarray
    triangles: np.ndarray
    tags: np.ndarray
    boundary_edges: np.ndarray
    edge_tags: np.ndarray
    geometry: PlanarDomain | Disk | None = None

    def __post_init__(self):
        object.__setattr__(self, "vertices", _frozen(self.vertices, float).reshape(-1, 2))
        object.__setattr__(self, "triangles", _frozen(self.triangles, np.int64).reshape(-1, 3))
        object.__setattr__(self, "tags", _frozen(self.tags, np.int64))
        object.__setattr__(self, "boundary_edges", _frozen(self.boundary_edges, np.int64).reshape(-1, 2))
        object.__setattr__(self, "edge_tags", _frozen(self.edge_tags, np.int64))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @cached_property
    def signed_areas(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        e1 = p[:, 1] - p[:, 0]
        e2 = p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    @cached_property
    def basis_gradients(self) -> np.ndarray:
        """Gradients of the three hat functions on each triangle, (M, 3, 2)."""
        p = self.vertices[self.triangles]
        e = np.roll(p, -2, axis=1) - np.roll(p, -1, axis=1)  # p[i+2] - p[i+1]
        grads = np.stack((-e[..., 1], e[..., 0]), axis=-1)
        return grads / (2.0 * self.signed_areas)[:, None, None]

    @cached_property
    def edges(self) -> np.ndarray:
        """Unique undirected edges, sorted, (E, 2)."""
        t = self.triangles
        all_edges = np.sort(np.vstack((t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]])), axis=1)
        return np.unique(all_edges, axis=0)

    @cached_property
    def boundary_mask(self) -> np.ndarray:
        return self.tags != Tag.INTERIOR

    @cached_property
    def lumped_areas(self) -> np.ndarray:
        return np.bincount(
            self.triangles.ravel(),
            weights=np.repeat(self.signed_areas / 3.0, 3),
            minlength=self.n_vertices,
        )

    def quality(self) -> "MeshQuality":
        return mesh_quality(self)

    def boundary_loop(self) -> np.ndarray:
        """Boundary vertex indices in counter-clockwise order."""
        nxt = {}
        # orient each boundary edge as it appears in its triangle
        t = self.triangles
        directed = np.vstack((t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]))
        bset = {tuple(sorted(e)) for e in self.boundary_edges.tolist()}
        for a, b in directed.tolist():
            if (min(a, b), max(a, b)) in bset:
                nxt[a] = b
        start = min(nxt)
        loop = [start]
        while True:
            v = nxt[loop[-1]]
            if v == start:
                break
            loop.append(v)
            if len(loop) > len(nxt):
                raise ValueError("boundary is not a single closed loop")
        return np.array(loop)

    @cached_property
    def polygon(self) -> Polygon:
        return Polygon(self.vertices[self.boundary_loop()])

    def boundary_area(self) -> float:
        p = self.vertices[self.boundary_loop()]
        x, y = p[:, 0], p[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


@dataclass(frozen=True)
class MeshQuality:
    h_max: float
    min_angle: float
    triangle_count: int


def mesh_quality(mesh: TriangleMesh) -> MeshQuality:
    p = mesh.vertices[mesh.triangles]
    sides = np.stack([p[:, (i + 1) % 3] - p[:, i] for i in range(3)], axis=1)
    lengths = np.linalg.norm(sides, axis=-1)
    angles = []
    for i in range(3):
        u = -sides[:, (i + 2) % 3]
        v = sides[:, i]
        c = np.einsum("ij,ij->i", u, v) / (lengths[:, (i + 2) % 3] * lengths[:, i])
        angles.append(np.degrees(np.arccos(np.clip(c, -1.0, 1.0))))
    return MeshQuality(float(lengths.max()), float(np.min(angles)), mesh.n_triangles)


def _check_areas(mesh: TriangleMesh) -> TriangleMesh:
    bad = np.flatnonzero(mesh.signed_areas <= 0)
    if bad.size:
        raise DegenerateCell(f"{bad.size} triangles with non-positive area (first: {bad[0]})")
    return mesh


def generate_strip_mesh(domain: PlanarDomain, nx: int, ny: int) -> TriangleMesh:
    """Mapped grid between the two boundary curves.

    Node (i, j) sits at x_i uniform and
    y = b_minus(x_i) + (j / ny) (b_plus(x_i) - b_minus(x_i)); every quad
    is cut along its (i, j)-(i+1, j+1) diagonal.  Corner nodes carry the
    curve tags.
    """
    if nx < 1 or ny < 1:
        raise ValueError("nx and ny must be at least 1")
    xs = np.linspace(domain.x_lo, domain.x_hi, nx + 1)
    lo = domain.b_minus(xs)
    hi = domain.b_plus(xs)
    frac = np.arange(ny + 1) / ny
    X = np.repeat(xs[:, None], ny + 1, axis=1)
    Y = lo[:, None] + frac[None, :] * (hi - lo)[:, None]

    idx = np.arange((nx + 1) * (ny + 1)).reshape(nx + 1, ny + 1)
    tags = np.full((nx + 1, ny + 1), Tag.INTERIOR, dtype=np.int64)
    tags[0, :] = Tag.LEFT_CAP
    tags[nx, :] = Tag.RIGHT_CAP
    tags[:, 0] = Tag.LOWER_CURVE
    tags[:, ny] = Tag.UPPER_CURVE

    pinched = domain.pinched_left and abs(hi[0] - lo[0]) <= PINCH_TOL
    if pinched:
        idx = idx.copy()
        idx[0, :] = idx[0, 0]

    v00 = idx[:-1, :-1].ravel()
    v10 = idx[1:, :-1].ravel()
    v11 = idx[1:, 1:].ravel()
    v01 = idx[:-1, 1:].ravel()
    tris = np.vstack((np.column_stack((v00, v10, v11)), np.column_stack((v00, v11, v01))))
    # interleave so both halves of a quad are adjacent in the list
    tris = tris.reshape(2, -1, 3).transpose(1, 0, 2).reshape(-1, 3)

    bedges = [
        (np.column_stack((idx[:-1, 0], idx[1:, 0])), Tag.LOWER_CURVE),
        (np.column_stack((idx[:-1, ny], idx[1:, ny])), Tag.UPPER_CURVE),
        (np.column_stack((idx[nx, :-1], idx[nx, 1:])), Tag.RIGHT_CAP),
    ]
    if not pinched:
        bedges.append((np.column_stack((idx[0, :-1], idx[0, 1:])), Tag.LEFT_CAP))

    verts = np.column_stack((X.ravel(), Y.ravel()))
    vtags = tags.ravel()
    if pinched:
        keep = np.ones(len(verts), dtype=bool)
        keep[idx[0, 0] + 1: ny + 1] = False
        tris = tris[(tris[:, 0] != tris[:, 1]) & (tris[:, 1] != tris[:, 2]) & (tris[:, 2] != tris[:, 0])]
        renumber = np.cumsum(keep) - 1
        verts, vtags = verts[keep], vtags[keep]
        tris = renumber[tris]
        bedges = [(renumber[e], t) for e, t in bedges]

    bnd = np.vstack([e for e, _ in bedges])
    btags = np.concatenate([np.full(len(e), t) for e, t in bedges])
    mesh = TriangleMesh(verts, tris, vtags, bnd, btags, domain)
    return _check_areas(mesh)


def generate_disk_mesh(R: float, rings: int) -> TriangleMesh:
    """Concentric rings of 6k nodes at radius kR/rings, zipped together by
    angle; ring 1 is a fan around the centre."""
    if rings < 1:
        raise ValueError("rings must be at least 1")
    verts = [(0.0, 0.0)]
    ring_ids = [np.array([0])]
    ring_angles = [np.array([0.0])]
    for k in range(1, rings + 1):
        n = 6 * k
        theta = 2.0 * np.pi * np.arange(n) / n
        r = R * k / rings
        start = len(verts)
        verts.extend(zip(r * np.cos(theta), r * np.sin(theta)))
        ring_ids.append(np.arange(start, start + n))
        ring_angles.append(theta)

    tris = []
    for k in range(1, rings + 1):
        outer, oth = ring_ids[k], ring_angles[k]
        n_out = len(outer)
        if k == 1:
            for j in range(n_out):
                tris.append((0, outer[j], outer[(j + 1) % n_out]))
            continue
        inner, ith = ring_ids[k - 1], ring_angles[k - 1]
        n_in = len(inner)
        i = j = 0
        while i < n_in or j < n_out:
            next_in = ith[i + 1] if i + 1 < n_in else 2.0 * np.pi
            next_out = oth[j + 1] if j + 1 < n_out else 2.0 * np.pi
            if j < n_out and (i >= n_in or next_out <= next_in):
                tris.append((inner[i % n_in], outer[j], outer[(j + 1) % n_out]))
                j += 1
            else:
                tris.append((inner[i % n_in], outer[j % n_out], inner[(i + 1) % n_in]))
                i += 1

    tags = np.zeros(len(verts), dtype=np.int64)
    rim = ring_ids[-1]
    tags[rim] = Tag.DISK_RIM
    bedges = np.column_stack((rim, np.roll(rim, -1)))
    mesh = TriangleMesh(
        np.array(verts), np.array(tris), tags, bedges, np.full(len(rim), Tag.DISK_RIM), Disk(float(R))
    )
    return _check_areas(mesh)


def _project(geometry, tag: int, p: np.ndarray) -> np.ndarray:
    if isinstance(geometry, Disk):
        if tag == Tag.DISK_RIM:
            return p * (geometry.R / np.linalg.norm(p))
        return p
    if isinstance(geometry, PlanarDomain):
        if tag == Tag.LOWER_CURVE:
            return np.array([p[0], float(geometry.b_minus(p[0]))])
        if tag == Tag.UPPER_CURVE:
            return np.array([p[0], float(geometry.b_plus(p[0]))])
    return p


def refine(mesh: TriangleMesh) -> TriangleMesh:
    """Split every triangle into four through its edge midpoints; boundary
    midpoints are pushed back onto the curve they discretize."""
    t = mesh.triangles
    local = np.sort(np.stack((t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]), axis=1), axis=2)
    edges, inverse = np.unique(local.reshape(-1, 2), axis=0, return_inverse=True)
    inverse = inverse.reshape(-1, 3)
    N = mesh.n_vertices
    mids = 0.5 * (mesh.vertices[edges[:, 0]] + mesh.vertices[edges[:, 1]])
    mid_tags = np.full(len(edges), Tag.INTERIOR, dtype=np.int64)

    lookup = {tuple(e): k for k, e in enumerate(edges.tolist())}
    new_bedges, new_btags = [], []
    for (a, b), tag in zip(mesh.boundary_edges.tolist(), mesh.edge_tags.tolist()):
        k = lookup[(min(a, b), max(a, b))]
        mid_tags[k] = tag
        mids[k] = _project(mesh.geometry, tag, mids[k])
        new_bedges += [(a, N + k), (N + k, b)]
        new_btags += [tag, tag]

    m01, m12, m20 = (N + inverse[:, 0], N + inverse[:, 1], N + inverse[:, 2])
    a, b, c = t[:, 0], t[:, 1], t[:, 2]
    tris = np.stack(
        (
            np.column_stack((a, m01, m20)),
            np.column_stack((m01, b, m12)),
            np.column_stack((m20, m12, c)),
            np.column_stack((m01, m12, m20)),
        ),
        axis=1,
    ).reshape(-1, 3)
    out = TriangleMesh(
        np.vstack((mesh.vertices, mids)),
        tris,
        np.concatenate((mesh.tags, mid_tags)),
        np.array(new_bedges),
        np.array(new_btags),
        mesh.geometry,
    )
    return _check_areas(out)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def mesh_to_text(mesh: TriangleMesh) -> str:
    lines = [f"vertices {mesh.n_vertices} triangles {mesh.n_triangles}"]
    for (x, y), tag in zip(mesh.vertices.tolist(), mesh.tags.tolist()):
        lines.append(f"{_fmt(x)} {_fmt(y)} {TAG_NAMES[Tag(tag)]}")
    for i, j, k in mesh.triangles.tolist():
        lines.append(f"{i} {j} {k}")
    return "\n".join(lines) + "\n"


def _boundary_edges_from_tags(triangles: np.ndarray, tags: np.ndarray):
    t = triangles
    e = np.sort(np.vstack((t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]])), axis=1)
    uniq, counts = np.unique(e, axis=0, return_counts=True)
    bnd = uniq[counts == 1]
    etags = []
    for a, b in bnd.tolist():
        ta, tb = tags[a], tags[b]
        if ta == tb:
            etags.append(ta)
        else:
            # corner to cap: the cap owns the edge
            caps = [x for x in (ta, tb) if x in (Tag.LEFT_CAP, Tag.RIGHT_CAP)]
            etags.append(caps[0] if caps else ta)
    return bnd, np.array(etags, dtype=np.int64)


def mesh_from_text(text: str, geometry=None) -> TriangleMesh:
    """Inverse of :func:`mesh_to_text`.

    Edge tags are reconstructed from vertex tags, which is exact for every
    mesh produced by this module except ones with a single cell across
    the strip.
    """
    lines = text.strip().splitlines()
    head = lines[0].split()
    if head[0] != "vertices" or head[2] != "triangles":
        raise ValueError("bad mesh header")
    n, m = int(head[1]), int(head[3])
    verts, tags = [], []
    for line in lines[1: 1 + n]:
        x, y, name = line.split()
        verts.append((float(x), float(y)))
        tags.append(TAG_BY_NAME[name])
    tris = [tuple(int(v) for v in line.split()) for line in lines[1 + n: 1 + n + m]]
    tris = np.array(tris, dtype=np.int64).reshape(-1, 3)
    tags = np.array(tags, dtype=np.int64)
    bnd, btags = _boundary_edges_from_tags(tris, tags)
    return TriangleMesh(np.array(verts), tris, tags, bnd, btags, geometry)


def write_mesh(mesh: TriangleMesh, path: str | Path) -> None:
    Path(path).write_text(mesh_to_text(mesh))
