import numpy as np
import pytest
import shapely
from hypothesis import given, settings
from hypothesis import strategies as st
from shapely.geometry import LineString, Polygon

from pennygraph import build_contact_graph, generate_lattice, trace_faces, triangulate_window
from pennygraph.faces import GeometryError, face_polygon, walk_area
from pennygraph.packing import DiskPacking, generate_random_subset
from pennygraph.triangulate import (
    _Poly,
    _split,
    is_diagonal,
    mesh_to_dict,
    optimal_triangulation,
    quality_report,
    triangle_angles,
    triangulate_corners,
    triangulate_face,
    face_area_residuals,
)

from conftest import SQRT3, spiked_hole_packing

H = SQRT3 / 2


def _check_face(pts, ids, tris):
    """Count, area identity, and brute-force diagonal checks for one face."""
    n = len(pts)
    assert tris.shape == (n - 2, 3)
    areas = np.array([walk_area(pts[t]) for t in tris])
    assert np.all(areas > 0)
    np.testing.assert_allclose(areas.sum(), walk_area(pts), rtol=1e-9)
    edges = {frozenset((ids[i], ids[(i + 1) % n])) for i in range(n)}
    for t in tris:
        for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
            if frozenset((ids[a], ids[b])) in edges:
                continue
            A, B = pts[a], pts[b]
            d = B - A
            # open segment must avoid every other vertex
            for c in range(n):
                if ids[c] in (ids[a], ids[b]):
                    continue
                w = pts[c] - A
                s = np.clip(w @ d / (d @ d), 0, 1)
                assert np.linalg.norm(w - s * d) > 1e-9


def test_triangle_face_unchanged():
    pts = np.array([[0, 0], [1, 0], [0.5, H]])
    (t,) = triangulate_face(pts)
    assert t.vertices == (0, 1, 2)
    np.testing.assert_allclose(t.angles, np.pi / 3)
    np.testing.assert_allclose(t.angles.sum(), np.pi, atol=1e-9)


def test_unit_square():
    tris = triangulate_face(np.array([[0, 0], [1, 0], [1, 1], [0, 1]], float))
    assert len(tris) == 2
    np.testing.assert_allclose(min(t.angles.min() for t in tris), np.pi / 4)


def test_rhombus_picks_short_diagonal():
    pts = np.array([[0, 0], [1, 0], [1.5, H], [0.5, H]])
    tris = triangulate_face(pts)
    np.testing.assert_allclose(min(t.angles.min() for t in tris), np.pi / 3, rtol=1e-12)
    for t in tris:
        np.testing.assert_allclose(t.lengths, 1.0, rtol=1e-12)
    # the other diagonal would give pi/6
    long_tris = np.array([[0, 1, 2], [0, 2, 3]])
    np.testing.assert_allclose(triangle_angles(pts[long_tris]).min(), np.pi / 6, rtol=1e-12)


def test_square_window(z2, z2_mesh):
    fs = trace_faces(z2)
    assert len(z2_mesh) == 2 * len(fs.bounded)
    np.testing.assert_allclose(z2_mesh.min_angle, np.pi / 4, rtol=1e-12)
    lo, hi = z2_mesh.edge_range
    np.testing.assert_allclose([lo, hi], [1.0, np.sqrt(2)], rtol=1e-12)
    rep = quality_report(z2_mesh, 4)
    assert rep["ok"] and rep["edge_max"] <= 4


def test_triangular_window(tri_window):
    fs = trace_faces(tri_window)
    t = triangulate_window(tri_window, fs)
    assert len(t) == len(fs.bounded)
    np.testing.assert_allclose(t.min_angle, np.pi / 3, rtol=1e-12)
    np.testing.assert_allclose(t.lengths, 1.0, rtol=1e-12)
    assert quality_report(t, 3)["ok"]


def test_hexagon_face_diagonals_short():
    ring = np.array([[np.cos(a), np.sin(a)] for a in np.arange(6) * np.pi / 3])
    g = build_contact_graph(DiskPacking(ring))
    fs = trace_faces(g)
    assert fs.D == 6
    t = triangulate_window(g, fs)
    rep = quality_report(t, fs.D)
    assert rep["ok"] and rep["edge_max"] < 6
    assert len(t) == 4


def test_quality_report_lists_violations(z2_mesh):
    rep = quality_report(z2_mesh, 1)
    assert not rep["ok"] and len(rep["violations"]) == len(z2_mesh)


def test_spiked_hole_triangulation():
    pk, _, _ = spiked_hole_packing()
    g = build_contact_graph(pk)
    fs = trace_faces(g)
    t = triangulate_window(g, fs)
    for fid in fs.bounded_ids():
        f = fs.faces[fid]
        idx = t.triangles_of_face(fid)
        assert len(idx) == f.degree - 2
    assert face_area_residuals(g, fs, t).max() < 1e-9
    assert t.min_angle > 0


def test_pinched_walk_rejected():
    # the bowtie's outer walk reversed: two lobes touching at one point
    h = H
    pts = np.array([[0, 0], [1, 0], [2, 0], [1.5, -h], [1, 0], [0.5, h]])[::-1]
    ids = [0, 1, 2, 3, 1, 4][::-1]
    with pytest.raises(GeometryError):
        # lobes meet only at a point: no diagonal triangulation with 4 triangles
        triangulate_corners(pts, ids)


def test_split_path_direct():
    # convex corner 0 has the reflex corner 3 inside its ear triangle
    pts = np.array([[0, 0], [4, 0], [4, 4], [2, 1], [0, 4]], float)
    ids = list(range(5))
    out, log = [], []
    _split(_Poly(pts, ids, range(5)), "greedy", out, log)
    assert log[0][0] == "split"
    assert set(log[0][1:]) == {0, 3}
    tris = np.array(out)
    _check_face(pts, ids, tris)


def test_is_diagonal_examples():
    pts = np.array([[0, 0], [4, 0], [4, 4], [2, 1], [0, 4]], float)
    assert not is_diagonal(pts, None, 0, 2)  # passes through the notch's outside
    assert is_diagonal(pts, None, 0, 3)
    assert not is_diagonal(pts, None, 0, 1)  # an edge


def test_bad_policy():
    with pytest.raises(ValueError):
        triangulate_corners(np.eye(3), policy="best")


def test_window_rejects_multiple_components():
    g = build_contact_graph(DiskPacking([[0, 0], [1, 0], [0.5, H], [5, 5], [6, 5], [5.5, 5 + H]]))
    with pytest.raises(ValueError):
        triangulate_window(g, trace_faces(g))


def _faces_of(g):
    fs = trace_faces(g)
    for f in fs.bounded:
        yield face_polygon(g, f), list(f.vertices)


def test_corpus_faces_with_shapely(random_corpus):
    count = 0
    for g in random_corpus:
        for pts, ids in _faces_of(g):
            tris, _ = triangulate_corners(pts, ids)
            _check_face(pts, ids, tris)
            if len(set(ids)) != len(ids):
                continue
            poly = Polygon(pts)
            assert poly.is_valid
            for t in tris:
                for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
                    seg = LineString([pts[a], pts[b]])
                    assert poly.buffer(1e-9).covers(seg)
            count += 1
    assert count > 100


def test_greedy_not_worse_than_first(random_corpus):
    for g in random_corpus:
        for pts, ids in _faces_of(g):
            qg = triangle_angles(pts[triangulate_corners(pts, ids, "greedy")[0]]).min()
            qf = triangle_angles(pts[triangulate_corners(pts, ids, "first")[0]]).min()
            assert qg >= qf - 1e-12


def test_greedy_vs_optimal(random_corpus):
    checked = 0
    for g in random_corpus:
        for pts, ids in _faces_of(g):
            if len(set(ids)) != len(ids) or len(ids) > 12 or len(ids) < 4:
                continue
            opt, _ = optimal_triangulation(pts)
            greedy = triangle_angles(pts[triangulate_corners(pts, ids)[0]]).min()
            assert greedy <= opt + 1e-12
            checked += 1
    assert checked > 10


def test_optimal_limits():
    with pytest.raises(ValueError):
        optimal_triangulation(np.random.default_rng(0).random((13, 2)))
    q, tris = optimal_triangulation(np.array([[0, 0], [1, 0], [1.5, H], [0.5, H]]))
    np.testing.assert_allclose(q, np.pi / 3)


@st.composite
def star_polygons(draw):
    n = draw(st.integers(3, 14))
    gaps = draw(st.lists(st.floats(0.2, 1.0), min_size=n, max_size=n))
    radii = draw(st.lists(st.floats(0.5, 3.0), min_size=n, max_size=n))
    theta = np.cumsum(gaps) / np.sum(gaps) * 2 * np.pi
    return np.column_stack([radii * np.cos(theta), radii * np.sin(theta)])


@settings(max_examples=150, deadline=None)
@given(star_polygons())
def test_star_polygons_property(pts):
    poly = Polygon(pts)
    if not poly.is_valid or shapely.get_num_coordinates(poly) < 4:
        return
    ids = list(range(len(pts)))
    tris, _ = triangulate_corners(pts, ids)
    _check_face(pts, ids, tris)
    for t in tris:
        tri = Polygon(pts[t])
        assert poly.buffer(1e-9).covers(tri)


def test_point_location(z2_mesh):
    rng = np.random.default_rng(1)
    pts = rng.uniform(-19.5, 19.5, (200, 2))
    for q in pts:
        t, lam = z2_mesh.locate(q)
        assert t >= 0
        np.testing.assert_allclose(lam @ z2_mesh.coords[z2_mesh.triangles[t]], q, atol=1e-12)
    assert z2_mesh.locate([100.0, 0.0])[0] == -1
    # on a shared edge the lowest triangle id wins
    v = z2_mesh.coords[z2_mesh.triangles[0]]
    q = 0.5 * (v[0] + v[1])
    assert z2_mesh.locate(q)[0] == min(t for t in range(len(z2_mesh))
                                       if np.all(_bary(z2_mesh, t, q) >= -1e-12))


def _bary(mesh, t, q):
    a, b, c = mesh.coords[mesh.triangles[t]]
    T = np.column_stack([b - a, c - a])
    l12 = np.linalg.solve(T, q - a)
    return np.array([1 - l12.sum(), *l12])


def test_mesh_export(hex_flower):
    doc = mesh_to_dict(triangulate_window(hex_flower, trace_faces(hex_flower)))
    assert set(doc) == {"vertices", "triangles", "face_of_triangle"}
    assert len(doc["triangles"]) == 6
