import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pennygraph import ball, build_contact_graph, generate_lattice, solve_dirichlet, trace_faces, triangulate_window
from pennygraph.extend import (
    Disk,
    PLField,
    Rect,
    disk_mass_matrix,
    integrate_pl_square,
    ngon_area,
    pl_eval,
    planar_mvi_ratio,
    trace_constant,
    triangle_mass,
)
from pennygraph.field import random_trig_data
from pennygraph.triangulate import Triangulation

from conftest import SQRT3, center_vertex


@pytest.fixture(scope="module")
def window():
    g = build_contact_graph(generate_lattice("square", 40))
    return g, triangulate_window(g, trace_faces(g))


def _area(p):
    a, b = p[1] - p[0], p[2] - p[0]
    return 0.5 * abs(a[0] * b[1] - a[1] * b[0])


def _single(points):
    p = np.asarray(points, float)
    return Triangulation(p, [[0, 1, 2]], [0], [3], "greedy")


def test_eval_vertex_midpoint_centroid(window):
    g, mesh = window
    f = np.random.default_rng(0).standard_normal(g.n_vertices)
    pl = PLField(mesh, f, g)
    for v in (0, 17, 500):
        assert pl_eval(pl, g.coords[v]) == pytest.approx(f[v], abs=1e-15)
    t = _single([[0, 0], [1, 0], [0, 1]])
    assert pl_eval(PLField(t, [0.0, 1.0, 0.0]), [0.5, 0.0]) == pytest.approx(0.5, abs=1e-15)
    assert pl_eval(PLField(t, [1.0, 2.0, 3.0]), [1 / 3, 1 / 3]) == pytest.approx(2.0, abs=1e-14)
    with pytest.raises(ValueError):
        pl_eval(pl, [1000.0, 0.0])


def test_field_length_checked(window):
    g, mesh = window
    with pytest.raises(ValueError):
        PLField(mesh, np.zeros(4))


def test_continuity_across_edges(window):
    g, mesh = window
    rng = np.random.default_rng(2)
    f = rng.standard_normal(g.n_vertices)
    tri = mesh.triangles
    owner = {}
    for t, row in enumerate(tri):
        for a, b in ((row[0], row[1]), (row[1], row[2]), (row[2], row[0])):
            owner.setdefault(frozenset((a, b)), []).append(t)
    shared = [(tuple(k), v) for k, v in owner.items() if len(v) == 2]
    pick = rng.choice(len(shared), 100, replace=False)
    for i in pick:
        (a, b), (t1, t2) = shared[i]
        s = rng.random()
        q = (1 - s) * g.coords[a] + s * g.coords[b]
        vals = []
        for t in (t1, t2):
            A, B, C = g.coords[tri[t]]
            l12 = np.linalg.solve(np.column_stack([B - A, C - A]), q - A)
            lam = np.array([1 - l12.sum(), *l12])
            vals.append(lam @ f[tri[t]])
        assert abs(vals[0] - vals[1]) <= 1e-10


def test_integral_closed_forms():
    t = _single([[0, 0], [2, 0], [0, 1]])  # unit area
    assert integrate_pl_square(PLField(t, np.ones(3)), 0) == pytest.approx(1.0, rel=1e-14)
    assert integrate_pl_square(PLField(t, [1.0, -1.0, 0.0]), 0) == pytest.approx(1 / 6, rel=1e-14)


def test_one_sixth_monte_carlo():
    pts = np.array([[0, 0], [2, 0], [0, 1]], float)
    rng = np.random.default_rng(7)
    u, v = rng.random((2, 2_000_000))
    flip = u + v > 1
    u[flip], v[flip] = 1 - u[flip], 1 - v[flip]
    # barycentric (1 - u - v, u, v) with corner values (1, -1, 0)
    vals = (1 - u - v) - u
    mc = np.mean(vals**2) * 1.0
    assert mc == pytest.approx(1 / 6, abs=1e-3)
    assert integrate_pl_square(PLField(_single(pts), [1.0, -1.0, 0.0]), 0) == pytest.approx(mc, abs=1e-3)


def test_disk_of_ones(window):
    g, mesh = window
    pl = PLField(mesh, np.ones(g.n_vertices), g)
    for R in (3.0, 7.5, 15.25):
        val = integrate_pl_square(pl, Disk((0.3, -0.2), R))
        assert val == pytest.approx(ngon_area(R), rel=1e-12)
        assert abs(val / (np.pi * R**2) - 1) < 2.1e-3


def test_disk_outside_mesh_is_zero(window):
    g, mesh = window
    pl = PLField(mesh, np.ones(g.n_vertices), g)
    assert integrate_pl_square(pl, Disk((500.0, 0.0), 3.0)) == 0.0
    _, covered = disk_mass_matrix(mesh, (500.0, 0.0), 3.0)
    assert covered == 0.0


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-5, 5), st.floats(0.5, 8))
def test_integral_properties(seed, alpha, R):
    g = build_contact_graph(generate_lattice("square", 12))
    mesh = triangulate_window(g, trace_faces(g))
    f = np.random.default_rng(seed).standard_normal(g.n_vertices)
    base = integrate_pl_square(PLField(mesh, f), Disk((0.1, 0.2), R))
    scaled = integrate_pl_square(PLField(mesh, alpha * f), Disk((0.1, 0.2), R))
    assert scaled == pytest.approx(alpha**2 * base, rel=1e-12, abs=1e-300)
    bigger = integrate_pl_square(PLField(mesh, f), Disk((0.1, 0.2), R + 0.5))
    assert bigger >= base * (1 - 1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-6, 6), st.floats(-6, 6), st.floats(0.05, 0.95))
def test_rectangle_additivity(seed, x0, y0, s):
    g = build_contact_graph(generate_lattice("square", 10))
    mesh = triangulate_window(g, trace_faces(g))
    pl = PLField(mesh, np.random.default_rng(seed).standard_normal(g.n_vertices))
    x1, y1 = x0 + 3.3, y0 + 2.7
    xm = x0 + s * (x1 - x0)
    whole = integrate_pl_square(pl, Rect(x0, y0, x1, y1))
    parts = integrate_pl_square(pl, Rect(x0, y0, xm, y1)) + integrate_pl_square(pl, Rect(xm, y0, x1, y1))
    assert parts == pytest.approx(whole, rel=1e-10, abs=1e-12)


def test_trace_constant_examples():
    h = SQRT3 / 2
    assert trace_constant([[0, 0], [1, 0], [0.5, h]]) == pytest.approx(16 * SQRT3, rel=1e-12)
    pts = np.array([[0.3, 0.1], [2.0, -0.4], [1.1, 1.7]])
    area = _area(pts)
    assert trace_constant(pts) * area == pytest.approx(12.0, rel=1e-12)
    with pytest.raises(ValueError):
        trace_constant([[0, 0], [1, 0], [2, 0]])


def test_trace_minimizer_has_zero_sum():
    w, V = np.linalg.eigh(triangle_mass(1.0))
    np.testing.assert_allclose(V[:, 0].sum(), 0.0, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_trace_inequality(seed):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-3, 3, (3, 2))
    area = _area(pts)
    if area < 1e-3:
        return
    C = trace_constant(pts)
    Mloc = triangle_mass(area)
    f = rng.standard_normal((200, 3))
    lhs = np.sum(f**2, axis=1)
    rhs = C * np.einsum("ij,jk,ik->i", f, Mloc, f)
    assert np.all(lhs <= rhs * (1 + 1e-9))
    assert np.sum(np.zeros(3) ** 2) <= C * 0.0


def test_planar_mvi_constant(window):
    g, mesh = window
    pl = PLField(mesh, np.full(g.n_vertices, 2.0), g)
    x0 = center_vertex(g)
    for R in (16.0, 19.5):
        r = planar_mvi_ratio(pl, g.coords[x0], R)
        assert abs(r - 1 / np.pi) <= 2.1e-3


def test_planar_mvi_odd_field_zero(window):
    g, mesh = window
    x0 = center_vertex(g)
    f = g.coords[:, 0] - g.coords[x0, 0]
    assert planar_mvi_ratio(PLField(mesh, f, g), g.coords[x0], 16.0) == 0.0


def test_planar_mvi_preconditions(window):
    g, mesh = window
    x0 = center_vertex(g)
    const = PLField(mesh, np.ones(g.n_vertices), g)
    with pytest.raises(ValueError):
        planar_mvi_ratio(const, g.coords[x0], 15.0)  # below R1 = 4 D = 16
    with pytest.raises(ValueError):
        planar_mvi_ratio(const, g.coords[x0], 45.0)  # disk leaves the mesh
    with pytest.raises(ValueError):
        planar_mvi_ratio(PLField(mesh, g.coords[:, 0] ** 2, g), g.coords[x0], 16.0)
    with pytest.raises(ValueError):
        planar_mvi_ratio(PLField(mesh, np.ones(g.n_vertices)), g.coords[x0], 16.0)


def test_planar_mvi_random_probes_finite(window):
    g, mesh = window
    x0 = center_vertex(g)
    omega = ball(g, x0, 32)
    rng = np.random.default_rng(4)
    vals = [planar_mvi_ratio(PLField(mesh, solve_dirichlet(g, omega, random_trig_data(g, x0, rng)).values, g),
                             g.coords[x0], 16.0) for _ in range(5)]
    assert np.all(np.isfinite(vals)) and max(vals) < 1.0
