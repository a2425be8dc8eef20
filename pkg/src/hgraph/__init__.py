"""Constant mean curvature graphs on generalized strips: a finite element
solver, boundary-geometry tools and numeric checks of height estimates."""

from .barriers import ContactReport, CylinderBarrier, Side, SphereBarrier, classify_side, cylinder_descent_bound, first_contact
from .domain import PiecewiseLinear, PlanarDomain, Rectangle, build_generalized_strip
from .errors import *  # noqa: F401,F403
from .estimates import (
    Transversal,
    VariationStats,
    check_boundary_gap,
    check_classical_bounds,
    check_corollary,
    check_prop_max,
    check_prop_min,
    check_theorem1,
    check_theorem2prime,
    check_theorem3,
    variation,
)
from .geometry import (
    Label,
    LambdaDecomposition,
    clip_decompose,
    good_components,
    lemma1_witness,
    natural_partition,
    partition_lambda,
    precedes,
    replay_theorem1_reduction,
    trace_path,
)
from .mesh import Tag, TriangleMesh, generate_disk_mesh, generate_strip_mesh, mesh_quality, refine
from .profile import ProfileCurve, profile_project, set_distance
from .reports import EstimateReport
from .solver import (
    BoundaryData,
    DirichletProblem,
    Solution,
    SolverOptions,
    energy,
    energy_gradient,
    energy_hessian,
    exact_cap,
    exact_cylinder,
    interpolate,
    solve_dirichlet,
)

__version__ = "0.1.0"
