"""Dirichlet problem for div(grad u / sqrt(1 + |grad u|^2)) = 2H.

The P1 discretization minimizes

    E[u] = sum_T |T| (sqrt(1 + |grad u_T|^2) + 2H mean_T(u)),

whose Euler-Lagrange equation is the constant mean curvature equation.
E is convex, so a damped Newton iteration with Armijo backtracking is
globally convergent whenever a minimizer exists.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .domain import PiecewiseLinear, PlanarDomain
from .errors import BadRadius, BadWidth, GradientBlowup, NoConvergence, PointOutside
from .mesh import Disk, Tag, TriangleMesh, _fmt, mesh_to_text

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BoundaryData:
    """Dirichlet values per boundary tag.

    ``f_minus``/``f_plus`` are functions of x on the lower/upper curve.
    Cap values are functions of y; when omitted they interpolate linearly
    between the curve values at the cap ends.  ``rim`` is a function of
    the polar angle (or a constant) for disk meshes.
    """

    f_minus: PiecewiseLinear | None = None
    f_plus: PiecewiseLinear | None = None
    left_cap: Callable | None = None
    right_cap: Callable | None = None
    rim: Callable | float | None = None

    @classmethod
    def zero(cls, lo: float, hi: float) -> "BoundaryData":
        z = PiecewiseLinear.constant(0.0, lo, hi)
        return cls(z, z)

    def _cap(self, domain: PlanarDomain, x: float, y: np.ndarray, fn) -> np.ndarray:
        if fn is not None:
            return np.asarray(fn(y), dtype=float) * np.ones_like(y)
        lo, hi = float(domain.b_minus(x)), float(domain.b_plus(x))
        vlo, vhi = float(self.f_minus(x)), float(self.f_plus(x))
        if hi - lo <= 0:
            return np.full_like(y, vlo)
        s = (y - lo) / (hi - lo)
        return vlo + s * (vhi - vlo)

    def values(self, mesh: TriangleMesh) -> np.ndarray:
        """Prescribed values at boundary vertices (NaN in the interior)."""
        out = np.full(mesh.n_vertices, np.nan)
        v, tags = mesh.vertices, mesh.tags
        geom = mesh.geometry
        for tag in (Tag.LOWER_CURVE, Tag.UPPER_CURVE, Tag.LEFT_CAP, Tag.RIGHT_CAP, Tag.DISK_RIM):
            sel = np.flatnonzero(tags == tag)
            if sel.size == 0:
                continue
            x, y = v[sel, 0], v[sel, 1]
            if tag == Tag.LOWER_CURVE:
                out[sel] = self.f_minus(x)
            elif tag == Tag.UPPER_CURVE:
                out[sel] = self.f_plus(x)
            elif tag == Tag.LEFT_CAP:
                out[sel] = self._cap(geom, geom.x_lo, y, self.left_cap)
            elif tag == Tag.RIGHT_CAP:
                out[sel] = self._cap(geom, geom.x_hi, y, self.right_cap)
            else:
                if callable(self.rim):
                    out[sel] = self.rim(np.arctan2(y, x))
                else:
                    out[sel] = 0.0 if self.rim is None else float(self.rim)
        return out


@dataclass(frozen=True, eq=False)
class DirichletProblem:
    mesh: TriangleMesh
    data: BoundaryData
    H: float

    def __post_init__(self):
        if not self.H > 0:
            raise ValueError("H must be positive")
        geom = self.mesh.geometry
        if isinstance(geom, PlanarDomain) and geom.pinched_left:
            a, b = float(self.data.f_minus(geom.x_lo)), float(self.data.f_plus(geom.x_lo))
            if abs(a - b) > 1e-12:
                raise ValueError("pinched domains need f_minus(x_lo) == f_plus(x_lo)")

    @cached_property
    def boundary_values(self) -> np.ndarray:
        vals = self.data.values(self.mesh)
        bnd = self.mesh.boundary_mask
        if np.any(np.isnan(vals[bnd])):
            raise ValueError("some boundary vertices received no value")
        return vals


@dataclass(frozen=True)
class SolverOptions:
    grad_tol: float = 1e-10
    max_iters: int = 200
    armijo_c: float = 1e-4
    armijo_shrink: float = 0.5
    grad_cap: float = 1e6

    def __post_init__(self):
        if min(self.grad_tol, self.max_iters, self.armijo_c, self.grad_cap) <= 0:
            raise ValueError("solver options must be positive")
        if not 0 < self.armijo_shrink < 1:
            raise ValueError("armijo_shrink must lie in (0, 1)")


@dataclass(frozen=True, eq=False)
class Solution:
    mesh: TriangleMesh
    u: np.ndarray
    grad_norm: float
    iterations: int
    H: float
    energies: tuple[float, ...] = field(default=())

    def __post_init__(self):
        u = np.array(self.u, dtype=float)
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    @cached_property
    def locator(self) -> "PointLocator":
        return PointLocator(self.mesh)

    @property
    def h_max(self) -> float:
        return self.mesh.quality().h_max

    def boundary_values(self) -> np.ndarray:
        return self.u[self.mesh.boundary_mask]

    def traces(self) -> BoundaryData:
        """f_minus / f_plus of the discrete solution: its values along the
        lower and upper boundary edges, as functions of x."""
        mesh = self.mesh
        out = {}
        for tag in (Tag.LOWER_CURVE, Tag.UPPER_CURVE):
            ids = np.unique(mesh.boundary_edges[mesh.edge_tags == tag])
            if ids.size == 0:
                raise ValueError("solution mesh has no curve boundary")
            xs = mesh.vertices[ids, 0]
            order = np.argsort(xs, kind="stable")
            out[tag] = PiecewiseLinear(xs[order], self.u[ids][order])
        return BoundaryData(out[Tag.LOWER_CURVE], out[Tag.UPPER_CURVE])

    def to_text(self) -> str:
        return mesh_to_text(self.mesh) + "".join(f"u {_fmt(x)}\n" for x in self.u.tolist())


def _slopes(mesh: TriangleMesh, u: np.ndarray) -> np.ndarray:
    return np.einsum("tk,tkd->td", u[mesh.triangles], mesh.basis_gradients)


def energy(mesh: TriangleMesh, u: np.ndarray, H: float) -> float:
    g = _slopes(mesh, u)
    W = np.sqrt(1.0 + np.einsum("td,td->t", g, g))
    A = mesh.signed_areas
    return float(np.sum(A * (W + 2.0 * H * u[mesh.triangles].mean(axis=1))))


def energy_gradient(mesh: TriangleMesh, u: np.ndarray, H: float) -> np.ndarray:
    g = _slopes(mesh, u)
    W = np.sqrt(1.0 + np.einsum("td,td->t", g, g))
    A = mesh.signed_areas
    local = np.einsum("tkd,td->tk", mesh.basis_gradients, g) * (A / W)[:, None]
    local += (2.0 * H / 3.0) * A[:, None]
    return np.bincount(mesh.triangles.ravel(), weights=local.ravel(), minlength=mesh.n_vertices)


def energy_hessian(mesh: TriangleMesh, u: np.ndarray, H: float) -> sp.csr_matrix:
    """Exactly symmetric sparse Hessian of :func:`energy`."""
    g = _slopes(mesh, u)
    W2 = 1.0 + np.einsum("td,td->t", g, g)
    W = np.sqrt(W2)
    A = mesh.signed_areas
    B = np.eye(2)[None] / W[:, None, None] - np.einsum("ti,tj->tij", g, g) / (W * W2)[:, None, None]
    G = mesh.basis_gradients
    local = np.einsum("tid,tde,tje->tij", G, B, G) * A[:, None, None]
    t = mesh.triangles
    rows = np.repeat(t, 3, axis=1).ravel()
    cols = np.tile(t, (1, 3)).ravel()
    n = mesh.n_vertices
    K = sp.coo_matrix((local.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    return ((K + K.T) * 0.5).tocsr()


def _initial_guess(problem: DirichletProblem, free: np.ndarray) -> np.ndarray:
    """Poisson solve: minimizer of the energy's quadratic model at u = 0."""
    mesh = problem.mesh
    u = np.where(free, 0.0, problem.boundary_values)
    K = energy_hessian(mesh, np.zeros(mesh.n_vertices), problem.H)
    rhs = -(K @ u) - 2.0 * problem.H * mesh.lumped_areas
    u[free] = spla.spsolve(K[free][:, free].tocsc(), rhs[free])
    return u


def solve_dirichlet(problem: DirichletProblem, opts: SolverOptions | None = None) -> Solution:
    """Damped Newton on the interior nodal values.

    Stops when the interior gradient norm, relative to the norm of the
    volume-term gradient 2H * (lumped areas), drops below ``grad_tol``.
    Raises :class:`GradientBlowup` when some triangle slope exceeds
    ``grad_cap`` (the energy is then typically unbounded below, i.e. no
    solution exists) and :class:`NoConvergence` after ``max_iters``.
    """
    opts = opts or SolverOptions()
    mesh, H = problem.mesh, problem.H
    free = ~mesh.boundary_mask
    scale = 2.0 * H * float(np.linalg.norm(mesh.lumped_areas[free]))
    u = _initial_guess(problem, free)
    E = energy(mesh, u, H)
    energies = [E]
    eps = np.finfo(float).eps

    for it in range(opts.max_iters + 1):
        s = _slopes(mesh, u)
        slope_max = float(np.sqrt(np.max(np.einsum("td,td->t", s, s))))
        if not np.isfinite(slope_max) or slope_max > opts.grad_cap:
            raise GradientBlowup(it, slope_max)
        g = energy_gradient(mesh, u, H)[free]
        gnorm = float(np.linalg.norm(g)) / scale
        logger.debug("newton %d: E=%.16e |g|=%.3e slope=%.3e", it, E, gnorm, slope_max)
        if gnorm <= opts.grad_tol:
            return Solution(mesh, u, gnorm, it, H, tuple(energies))
        if it == opts.max_iters:
            break
        K = energy_hessian(mesh, u, H)[free][:, free].tocsc()
        d = spla.spsolve(K, -g)
        dirderiv = float(g @ d)
        if dirderiv >= 0:
            d, dirderiv = -g, -float(g @ g)

        if abs(dirderiv) <= 1e3 * eps * max(abs(E), 1.0):
            # the predicted decrease is below energy round-off, so Armijo
            # cannot discriminate: take the full step if it shrinks the gradient
            trial = u.copy()
            trial[free] += d
            E_trial = energy(mesh, trial, H)
            g_trial = float(np.linalg.norm(energy_gradient(mesh, trial, H)[free])) / scale
            if not g_trial < gnorm:
                raise NoConvergence(it, gnorm)
        else:
            alpha = 1.0
            while True:
                trial = u.copy()
                trial[free] += alpha * d
                E_trial = energy(mesh, trial, H)
                if np.isfinite(E_trial) and E_trial <= E + opts.armijo_c * alpha * dirderiv:
                    break
                alpha *= opts.armijo_shrink
                if alpha <= 1e-14:
                    raise NoConvergence(it, gnorm)
        u, E = trial, E_trial
        energies.append(E)

    raise NoConvergence(opts.max_iters, gnorm)


def exact_cap(H: float, R: float) -> Callable:
    """Lower spherical cap of radius 1/H over the disk of radius R, zero on
    the rim."""
    rho = 1.0 / H
    if not 0 < R < rho:
        raise BadRadius(f"need 0 < R < 1/H, got R={R}, 1/H={rho}")
    top = np.sqrt(rho * rho - R * R)

    def u(x, y):
        r2 = np.asarray(x, float) ** 2 + np.asarray(y, float) ** 2
        return top - np.sqrt(rho * rho - r2)

    return u


def exact_cylinder(H: float, w: float) -> Callable:
    """Cylinder of radius 1/(2H) over the strip |y| < w, zero on y = +-w."""
    if not 0 < w < 1.0 / (2.0 * H):
        raise BadWidth(f"need 0 < w < 1/(2H), got w={w}")
    top = np.sqrt(1.0 - 4.0 * H * H * w * w)

    def u(y):
        y = np.asarray(y, float)
        return (top - np.sqrt(1.0 - 4.0 * H * H * y * y)) / (2.0 * H)

    return u


class PointLocator:
    """Bucket grid over triangle bounding boxes for barycentric lookup."""

    def __init__(self, mesh: TriangleMesh, tol: float = 1e-9):
        self.mesh = mesh
        p = mesh.vertices[mesh.triangles]
        self.lo = p.min(axis=1)
        self.hi = p.max(axis=1)
        span = mesh.vertices.max(axis=0) - mesh.vertices.min(axis=0)
        self.origin = mesh.vertices.min(axis=0)
        self.tol = tol * float(np.hypot(*span))
        n = max(1, int(np.sqrt(mesh.n_triangles)))
        self.shape = (n, n)
        self.cell = np.maximum(span / n, 1e-300)
        buckets: dict[tuple[int, int], list[int]] = {}
        i0 = self._cell_index(self.lo - self.tol)
        i1 = self._cell_index(self.hi + self.tol)
        for t in range(mesh.n_triangles):
            for a in range(i0[t, 0], i1[t, 0] + 1):
                for b in range(i0[t, 1], i1[t, 1] + 1):
                    buckets.setdefault((a, b), []).append(t)
        self.buckets = {k: np.array(v) for k, v in buckets.items()}

    def _cell_index(self, pts):
        idx = np.floor((np.asarray(pts) - self.origin) / self.cell).astype(int)
        return np.clip(idx, 0, np.array(self.shape) - 1)

    def barycentric(self, tris: np.ndarray, p: np.ndarray) -> np.ndarray:
        v = self.mesh.vertices[self.mesh.triangles[tris]]
        d1 = v[:, 1] - v[:, 0]
        d2 = v[:, 2] - v[:, 0]
        q = p - v[:, 0]
        det = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
        l1 = (q[:, 0] * d2[:, 1] - q[:, 1] * d2[:, 0]) / det
        l2 = (d1[:, 0] * q[:, 1] - d1[:, 1] * q[:, 0]) / det
        return np.column_stack((1.0 - l1 - l2, l1, l2))

    def locate(self, p) -> tuple[int, np.ndarray]:
        p = np.asarray(p, float)
        key = tuple(self._cell_index(p[None])[0])
        cand = self.buckets.get(key)
        if cand is None:
            raise PointOutside(f"point {tuple(p)} is outside the mesh")
        lam = self.barycentric(cand, np.broadcast_to(p, (len(cand), 2)))
        # distance-like violation: how far outside each triangle the point is
        scale = np.linalg.norm(self.hi[cand] - self.lo[cand], axis=1)
        worst = np.minimum(lam.min(axis=1), 0.0) * scale
        k = int(np.argmax(worst))
        if worst[k] < -self.tol:
            raise PointOutside(f"point {tuple(p)} is outside the mesh")
        return int(cand[k]), lam[k]


def interpolate(solution: Solution, p) -> float:
    """P1 value of the solution at a point of the closed meshed domain."""
    t, lam = solution.locator.locate(p)
    return float(lam @ solution.u[solution.mesh.triangles[t]])


def interpolate_many(solution: Solution, pts) -> np.ndarray:
    return np.array([interpolate(solution, p) for p in np.asarray(pts, float).reshape(-1, 2)])
