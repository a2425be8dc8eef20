import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hgraph.domain import PiecewiseLinear, build_generalized_strip
from hgraph.mesh import (
    Tag,
    generate_disk_mesh,
    generate_strip_mesh,
    mesh_from_text,
    mesh_quality,
    mesh_to_text,
    refine,
)

from conftest import straight_strip


def unit_square():
    return build_generalized_strip(PiecewiseLinear.constant(0, 0, 1), PiecewiseLinear.constant(1, 0, 1), (0, 1))


def wedge():
    return build_generalized_strip(
        PiecewiseLinear.from_points([[0, 0], [2, -2]]), PiecewiseLinear.from_points([[0, 0], [2, 2]]), (0, 2), True
    )


def _edge_counts(mesh):
    e = np.sort(mesh.triangles[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2), axis=1)
    _, counts = np.unique(e, axis=0, return_counts=True)
    return counts


def check_invariants(mesh):
    assert np.all(mesh.signed_areas > 0)
    assert set(_edge_counts(mesh)) <= {1, 2}
    for i, j in mesh.boundary_edges:
        assert mesh.tags[i] != Tag.INTERIOR and mesh.tags[j] != Tag.INTERIOR
    assert mesh.signed_areas.sum() == pytest.approx(mesh.boundary_area(), rel=1e-12)


def test_unit_square_counts():
    m = generate_strip_mesh(unit_square(), 1, 1)
    assert (m.n_vertices, m.n_triangles) == (4, 2)
    check_invariants(m)


def test_grid_counts():
    m = generate_strip_mesh(straight_strip(), 10, 8)
    assert (m.n_vertices, m.n_triangles) == (99, 160)
    check_invariants(m)


def test_tags_on_grid():
    m = generate_strip_mesh(straight_strip(), 4, 3)
    v = m.vertices
    assert np.all(m.tags[np.isclose(v[:, 1], -0.4)] == Tag.LOWER_CURVE)
    assert np.all(m.tags[np.isclose(v[:, 1], 0.4)] == Tag.UPPER_CURVE)
    inner_left = np.isclose(v[:, 0], 0) & (np.abs(v[:, 1]) < 0.39)
    assert np.all(m.tags[inner_left] == Tag.LEFT_CAP)
    assert np.sum(m.tags == Tag.INTERIOR) == 3 * 2


def test_wedge_merges_left_cap():
    m = generate_strip_mesh(wedge(), 4, 3)
    at_tip = np.flatnonzero(np.all(np.isclose(m.vertices, 0.0), axis=1))
    assert len(at_tip) == 1
    assert not np.any(m.tags == Tag.LEFT_CAP)
    check_invariants(m)


def test_disk_counts():
    for rings in (1, 2, 5, 20):
        m = generate_disk_mesh(0.5, rings)
        assert m.n_vertices == 1 + sum(6 * k for k in range(1, rings + 1))
        assert np.sum(m.tags == Tag.DISK_RIM) == 6 * rings
        assert np.all(m.signed_areas > 0)
    fan = generate_disk_mesh(1.0, 1)
    assert fan.n_triangles == 6


def test_refine_counts_and_composition():
    m = generate_strip_mesh(unit_square(), 1, 1)
    r1 = refine(m)
    assert r1.n_triangles == 8
    r2 = refine(r1)
    assert r2.n_triangles == 32 == 16 * m.n_triangles
    check_invariants(r2)


def test_refine_halves_h():
    dom = build_generalized_strip(
        PiecewiseLinear.from_points([[0, -0.5], [1, -0.3], [2, -0.6], [3, -0.4]]),
        PiecewiseLinear.from_points([[0, 0.4], [1.5, 0.7], [3, 0.5]]),
        (0, 3),
    )
    m = generate_strip_mesh(dom, 12, 6)
    r = refine(m)
    ratio = r.quality().h_max / m.quality().h_max
    assert 0.45 <= ratio <= 0.55
    check_invariants(r)


def test_refine_projects_disk_rim():
    m = refine(generate_disk_mesh(0.5, 3))
    rim = m.vertices[m.tags == Tag.DISK_RIM]
    assert np.allclose(np.hypot(*rim.T), 0.5)
    assert np.all(m.signed_areas > 0)


def test_quality_fields():
    q = mesh_quality(generate_strip_mesh(unit_square(), 2, 2))
    assert q.h_max == pytest.approx(np.sqrt(0.5))
    assert q.min_angle == pytest.approx(45.0)
    assert q.triangle_count == 8


def test_text_round_trip():
    m = generate_strip_mesh(wedge(), 5, 4)
    text = mesh_to_text(m)
    assert text.splitlines()[0] == f"vertices {m.n_vertices} triangles {m.n_triangles}"
    back = mesh_from_text(text, m.geometry)
    assert np.array_equal(back.vertices, m.vertices)
    assert np.array_equal(back.triangles, m.triangles)
    assert np.array_equal(back.tags, m.tags)
    assert mesh_to_text(back) == text


@settings(max_examples=25, deadline=None)
@given(
    st.lists(st.floats(-1, 1), min_size=2, max_size=6),
    st.lists(st.floats(0.2, 1.5), min_size=2, max_size=6),
    st.integers(1, 12),
    st.integers(1, 6),
)
def test_area_matches_polygon(lower, gaps, nx, ny):
    n = min(len(lower), len(gaps))
    xs = np.linspace(0, 2, n)
    lo = np.asarray(lower[:n])
    hi = lo + np.asarray(gaps[:n])
    dom = build_generalized_strip(PiecewiseLinear(xs, lo), PiecewiseLinear(xs, hi), (0, 2))
    m = generate_strip_mesh(dom, nx, ny)
    assert np.all(m.signed_areas > 0)
    if n == 2 or nx % (n - 1) == 0:
        # grid columns include every breakpoint: the mesh tiles the polygon exactly
        assert m.signed_areas.sum() == pytest.approx(dom.polygon().area, rel=1e-12)
    assert m.signed_areas.sum() == pytest.approx(m.boundary_area(), rel=1e-12)
