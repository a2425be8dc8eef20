import numpy as np
import pytest

from hgraph.domain import PiecewiseLinear, build_generalized_strip
from hgraph.mesh import generate_disk_mesh, generate_strip_mesh
from hgraph.solver import BoundaryData, DirichletProblem, Solution, exact_cylinder, solve_dirichlet


def straight_strip(w=0.4, lo=0.0, hi=4.0):
    return build_generalized_strip(
        PiecewiseLinear.constant(-w, lo, hi), PiecewiseLinear.constant(w, lo, hi), (lo, hi)
    )


def cylinder_problem(nx=80, ny=32, w=0.4, H=1.0, length=4.0):
    dom = straight_strip(w, 0.0, length)
    prof = exact_cylinder(H, w)
    zero = PiecewiseLinear.constant(0.0, 0.0, length)
    return DirichletProblem(generate_strip_mesh(dom, nx, ny), BoundaryData(zero, zero, prof, prof), H)


def flat_solution(nx=40, ny=8, value=0.0, w=0.4, length=4.0, H=1.0):
    mesh = generate_strip_mesh(straight_strip(w, 0.0, length), nx, ny)
    return Solution(mesh, np.full(mesh.n_vertices, value), 0.0, 0, H)


@pytest.fixture(scope="session")
def cylinder_solution():
    return solve_dirichlet(cylinder_problem())


@pytest.fixture(scope="session")
def cap_solution():
    mesh = generate_disk_mesh(0.5, 40)
    return solve_dirichlet(DirichletProblem(mesh, BoundaryData(rim=0.0), 1.0))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
