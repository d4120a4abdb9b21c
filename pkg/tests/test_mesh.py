import math

import numpy as np
import pytest
from scipy.spatial import cKDTree

from minh2r.domains import helicoid_data, helicoidal_sector, scherk_triangle, axis_at_infinity_domain
from minh2r.hyperbolic import hyp_distance
from minh2r.mesh import MeshError, annulus_mesh, boundary_values, horocycle_points_ok, triangulate


@pytest.fixture(scope="module")
def scherk_meshes():
    d = scherk_triangle(2, 1.0)
    return d, triangulate(d, 0.1), triangulate(d, 0.05)


def test_triangle_count_ratio(scherk_meshes):
    _, coarse, fine = scherk_meshes
    assert 3.5 <= fine.n_triangles / coarse.n_triangles <= 4.5


def test_orientation_and_diameter(scherk_meshes):
    _, coarse, fine = scherk_meshes
    for m in (coarse, fine):
        assert np.all(m.signed_areas() > 0)
        assert m.hyp_diameters().max() <= 3 * m.ell


def test_one_tag_per_boundary_vertex(scherk_meshes):
    _, m, _ = scherk_meshes
    assert len(m.tags) == len(m.boundary) == len(np.unique(m.boundary))
    assert all(t[0] in "ehcv" for t in m.tags)
    # boundary vertices are exactly the vertices on boundary edges
    e = np.sort(np.concatenate([m.triangles[:, [0, 1]], m.triangles[:, [1, 2]], m.triangles[:, [2, 0]]]), axis=1)
    uniq, cnt = np.unique(e, axis=0, return_counts=True)
    assert set(np.unique(uniq[cnt == 1])) == set(m.boundary.tolist())


def test_boundary_vertices_on_their_curves(scherk_meshes):
    d, m, _ = scherk_meshes
    assert horocycle_points_ok(m) < 1e-10
    for i, e in enumerate(d.edges):
        idx = m.tag_vertices(f"e{i}")
        assert len(idx)
        assert max(d.geodesic(i).residual(z) for z in m.points[idx]) < 1e-10
    c = m.cuts["c0"]
    idx = m.tag_vertices("c0")
    np.testing.assert_allclose(hyp_distance(np.full(len(idx), c.c), m.points[idx]), 2 * math.atanh(c.r), atol=1e-10)


def test_arc_offset():
    d = helicoidal_sector(2, 1.0, helicoid_data(2, 1.0))
    m = triangulate(d, 0.1, eps_arc=0.05)
    idx = m.tag_vertices("e1")
    np.testing.assert_allclose(np.abs(m.points[idx]), 0.95, atol=1e-12)
    assert np.abs(m.points).max() <= 0.95 + 1e-12


def test_symmetric_half_disk():
    d = helicoidal_sector(1, 1.0, helicoid_data(1, 1.0))
    m = triangulate(d, 0.1, symmetric=True)
    mirror = -np.conj(m.points)  # reflection in the bisecting diameter
    tree = cKDTree(np.column_stack([m.points.real, m.points.imag]))
    dist, idx = tree.query(np.column_stack([mirror.real, mirror.imag]))
    assert dist.max() < 1e-12
    assert len(np.unique(idx)) == m.n_vertices


def test_axis_at_infinity_boundary_data():
    d = axis_at_infinity_domain(math.pi / 2, 1.0, variant="scherk")
    m = triangulate(d, 0.15)
    a, b = boundary_values(d, m)
    assert np.all(b[m.tags == "e1"] == 1.0) and np.all(a[m.tags == "e1"] == 0.0)
    assert np.all(a[m.tags == "e0"] == 0.0) and np.all(a[m.tags == "e2"] == 1.0)
    assert set(m.tags) >= {"h0", "h1", "h2"}


def test_boundary_values_on_scherk(scherk_meshes):
    _, m, _ = scherk_meshes
    u = m.dirichlet(8.0)
    assert np.all(u[m.tags == "e0"] == 0.0)
    assert np.all(u[m.tags == "e1"] == 8.0)
    assert np.all(u[m.tags == "e2"] == 1.0)
    assert u.min() >= 0.0 and u.max() <= 8.0


def test_annulus_mesh():
    m = annulus_mesh(0.2, 0.7, 0.1)
    r = np.abs(m.points)
    np.testing.assert_allclose(r[m.tag_vertices("inner")], 0.2, atol=1e-12)
    np.testing.assert_allclose(r[m.tag_vertices("outer")], 0.7, atol=1e-12)
    assert r.min() >= 0.2 - 1e-12
    with pytest.raises(MeshError):
        annulus_mesh(0.7, 0.2)
