import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hgraph.domain import PiecewiseLinear, Rectangle
from hgraph.errors import BadRectangle, HypothesisViolated, WindowOutside
from hgraph.estimates import (
    Transversal,
    check_boundary_gap,
    check_classical_bounds,
    check_corollary,
    check_prop_max,
    check_prop_min,
    check_theorem1,
    check_theorem2prime,
    check_theorem3,
    run_checks,
    slack_allowance,
    variation,
)
from hgraph.mesh import generate_strip_mesh
from hgraph.geometry import Label, clip_decompose, natural_partition
from hgraph.profile import profile_project
from hgraph.reports import EstimateReport
from hgraph.solver import BoundaryData, Solution

from conftest import flat_solution, straight_strip
from test_profile_barriers import brute_distance


def data_of(f_minus, f_plus=None):
    return BoundaryData(f_minus, f_plus if f_plus is not None else f_minus)


# -- variation ---------------------------------------------------------------


def test_variation_constant_and_linear():
    c = PiecewiseLinear.constant(2.0, 0, 10)
    assert variation(data_of(c), 5, 2).v_pair == 0.0
    lin = PiecewiseLinear.from_points([[0, 0], [10, 10]])
    v = variation(data_of(lin, c), 5, 2)
    assert v.v_minus == pytest.approx(4.0) and v.v_plus == 0.0 and v.v_pair == pytest.approx(4.0)


def test_variation_sawtooth_matches_sampling():
    xs = np.arange(0, 11)
    f = PiecewiseLinear(xs, np.where(xs % 2 == 0, 0.0, 1.0) * (1 + 0.1 * xs))
    for x0, t in [(5.0, 0.3), (5.0, 1.2), (3.3, 2.5), (6.1, 0.05)]:
        s = f(np.linspace(x0 - t, x0 + t, 100001))
        assert variation(data_of(f), x0, t).v_minus == pytest.approx(np.ptp(s), abs=1e-4)


def test_variation_window_must_fit():
    c = PiecewiseLinear.constant(0.0, 0, 4)
    with pytest.raises(WindowOutside):
        variation(data_of(c), 1.0, 2.0)
    with pytest.raises(ValueError):
        variation(data_of(c), 1.0, -0.1)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 3), st.floats(0, 3))
def test_variation_monotone_in_radius(seed, t1, t2):
    r = np.random.default_rng(seed)
    f = PiecewiseLinear(np.linspace(0, 10, 12), r.normal(size=12))
    g = PiecewiseLinear(np.linspace(0, 10, 7), r.normal(size=7))
    t, tp = sorted((t1, t2))
    assert variation(data_of(f, g), 5.0, t).v_pair <= variation(data_of(f, g), 5.0, tp).v_pair


# -- transversal -------------------------------------------------------------


def test_transversal_includes_edge_crossings(cylinder_solution):
    tr = Transversal.of(cylinder_solution, 2.0)
    ys = cylinder_solution.mesh.vertices[:, 1]
    grid = np.unique(ys[np.isclose(cylinder_solution.mesh.vertices[:, 0], 2.0)])
    for y in grid:
        assert np.any(np.isclose(tr.points[:, 1], y, atol=1e-12))
    assert tr.segment == (-0.4, 0.4)
    with pytest.raises(WindowOutside):
        Transversal.of(cylinder_solution, 4.5)


# -- transversal estimates on the oracles ------------------------------------


def test_cylinder_oracle_estimates(cylinder_solution):
    s = cylinder_solution
    lo = check_prop_min(s, 2.0, 0.0)
    assert -lo.measured == pytest.approx(-0.2, abs=5e-3) and lo.bound == -(0.0 - 3.0) and lo.passed
    hi = check_prop_max(s, 2.0, 0.0)
    assert hi.measured == pytest.approx(0.0, abs=1e-14) and hi.passed
    osc = check_theorem3(s, 2.0)
    assert osc.measured == pytest.approx(0.2, abs=5e-3) and osc.bound == pytest.approx(5.0) and osc.passed
    dev = check_corollary(s, 2.0)
    assert dev.measured == pytest.approx(0.2, abs=5e-3) and dev.passed
    gap = check_boundary_gap(s, 2.0)
    assert gap.measured == 0.0 and gap.bound == pytest.approx(2.0)


def test_flat_estimates():
    s = flat_solution()
    assert check_prop_min(s, 2.0, 0.0).measured == 0.0
    assert check_theorem3(s, 2.0).measured == 0.0
    assert check_corollary(s, 2.0).measured == 0.0
    five = flat_solution(value=5.0)
    assert check_prop_max(five, 2.0, 5.0).measured == pytest.approx(5.0, abs=1e-14)


def test_props_reject_wrong_level():
    s = flat_solution()
    with pytest.raises(HypothesisViolated):
        check_prop_min(s, 2.0, 0.1)
    with pytest.raises(HypothesisViolated):
        check_prop_max(s, 2.0, -0.1)
    with pytest.raises(WindowOutside):
        check_prop_min(s, 1.0, 0.0)


def test_classical_bounds_on_oracles(cap_solution, cylinder_solution):
    up, down = check_classical_bounds(cap_solution)
    assert up.passed and down.passed
    assert -down.measured == pytest.approx(np.sqrt(0.75) - 1, abs=5e-4)
    up, down = check_classical_bounds(cylinder_solution)
    # the caps carry the profile, so the boundary minimum is -0.2
    assert up.passed and down.passed and down.bound == pytest.approx(1.2)
    up, down = check_classical_bounds(flat_solution())
    assert up.measured == up.bound == 0.0


# -- profile-distance estimates ----------------------------------------------


def test_profile_distance_flat_and_cylinder(cylinder_solution):
    rect = Rectangle(2.0, 1.0, (2.0, 0.0))
    flat = check_theorem2prime(flat_solution(), rect)
    assert flat.measured == 0.0 and flat.bound == 4.0 and flat.passed
    assert check_theorem1(flat_solution(), rect).measured == 0.0
    cyl = check_theorem2prime(cylinder_solution, rect)
    assert cyl.measured == 0.0


def test_profile_distance_small_rect_rejected():
    with pytest.raises(BadRectangle):
        check_theorem1(flat_solution(), Rectangle(0.9, 1.0, (2.0, 0.0)))


def test_profile_distance_against_dense_sampling():
    # synthetic field equal to 0 on the lower curve and 5 on the upper one
    mesh = generate_strip_mesh(straight_strip(0.1, 0, 4), 40, 4)
    y = mesh.vertices[:, 1]
    sol = Solution(mesh, 25.0 * (y + 0.1), 0.0, 0, 1.0)
    rect = Rectangle(1.5, 1.0, (2.0, 0.0))
    rep = check_theorem2prime(sol, rect)
    dec = natural_partition(clip_decompose(mesh.polygon, rect))
    A = profile_project(sol, dec.gamma(Label.LAMBDA1)[0])
    B = profile_project(sol, dec.gamma(Label.LAMBDA2)[0])
    assert rep.measured == pytest.approx(brute_distance(A, B, 401), abs=1e-3)
    assert rep.measured == pytest.approx(5.0)
    assert not rep.passed  # a synthetic field need not obey the estimate


# -- report plumbing ---------------------------------------------------------


def test_reports_self_consistent_and_serializable(cylinder_solution):
    reps = run_checks(cylinder_solution, 2.0, Rectangle(1.5, 1.0, (2.0, 0.0)))
    names = {r.name for r in reps}
    assert {"oscillation", "boundary_gap", "deviation", "transversal_min", "transversal_max"} <= names
    assert {"profile_distance_2a", "profile_distance_2_over_H"} <= names
    for r in reps:
        assert r.passed == r.recompute()
        assert r.slack == slack_allowance(cylinder_solution)
        back = EstimateReport.from_dict(json.loads(json.dumps(r.to_dict())))
        assert back == r


def test_run_checks_skips_windows_near_caps(cylinder_solution):
    names = [r.name for r in run_checks(cylinder_solution, 0.5)]
    assert "transversal_max" in names and "oscillation" not in names


def test_inconsistent_pass_flag_rejected():
    d = EstimateReport("x", 1.0, 0.0, 0.5).to_dict()
    d["pass"] = True
    with pytest.raises(ValueError):
        EstimateReport.from_dict(d)


@settings(max_examples=50, deadline=None)
@given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6), st.floats(0, 10))
def test_report_predicate(measured, bound, slack):
    r = EstimateReport("x", measured, bound, slack)
    assert r.passed == (measured <= bound + slack) == r.recompute()
