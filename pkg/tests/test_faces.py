import numpy as np
import pytest

from pennygraph import build_contact_graph, generate_lattice, trace_faces
from pennygraph.faces import (
    euler_characteristics,
    face_polygon,
    faces_to_dict,
    outer_boundary,
    walk_area,
)
from pennygraph.packing import DiskPacking, generate_random_subset

from conftest import SQRT3, bowtie_packing, spiked_hole_packing

TRI = SQRT3 / 4


def _check_invariants(g, fs):
    # every directed edge in exactly one walk, chained
    seen = np.zeros(len(g.indices), dtype=int)
    for f in fs.faces:
        for a, b in zip(f.edges, f.edges[1:] + f.edges[:1]):
            assert g.indices[a] == g.tail[b]
        seen[list(f.edges)] += 1
    assert np.all(seen == 1)
    outer_per_comp = np.zeros(g.n_components, int)
    for f in fs.faces:
        assert f.turning in (-1, 1)
        outer_per_comp[g.component[f.vertices[0]]] += f.outer
    isolated = np.bincount(g.component[g.degree == 0], minlength=g.n_components)
    assert np.all(outer_per_comp + isolated == 1)
    assert sum(f.degree for f in fs.faces) == 2 * g.n_edges
    assert all(v == 2 for v in euler_characteristics(g, fs).values())
    for f in fs.bounded:
        np.testing.assert_allclose(f.angles.sum(), (f.degree - 2) * np.pi, atol=1e-6)


def test_unit_square_cycle():
    g = build_contact_graph(DiskPacking([[0, 0], [1, 0], [1, 1], [0, 1]]))
    fs = trace_faces(g)
    assert sorted((f.degree, f.outer) for f in fs.faces) == [(4, False), (4, True)]
    assert fs.D == 4
    inner = fs.bounded[0]
    assert len(set(inner.vertices)) == 4
    np.testing.assert_allclose(walk_area(face_polygon(g, inner)), 1.0)
    _check_invariants(g, fs)


def test_hex_flower(hex_flower):
    fs = trace_faces(hex_flower)
    assert len(fs.bounded) == 6 and all(f.degree == 3 for f in fs.bounded)
    assert sum(f.outer for f in fs.faces) == 1
    assert fs.D == 3
    for f in fs.bounded:
        np.testing.assert_allclose(walk_area(face_polygon(hex_flower, f)), TRI, rtol=1e-12)
    _check_invariants(hex_flower, fs)


def test_path_of_three():
    g = build_contact_graph(DiskPacking([[0, 0], [1, 0], [2, 0]]))
    fs = trace_faces(g)
    assert len(fs.faces) == 1
    (f,) = fs.faces
    assert f.outer and f.degree == 4
    assert fs.D == 0
    _check_invariants(g, fs)


def test_outer_face_polygon_rejected(hex_flower):
    fs = trace_faces(hex_flower)
    outer = next(f for f in fs.faces if f.outer)
    with pytest.raises(ValueError):
        face_polygon(hex_flower, outer)


def test_spiked_hole_face():
    pk, tip, anchor = spiked_hole_packing()
    g = build_contact_graph(pk)
    fs = trace_faces(g)
    _check_invariants(g, fs)
    big = [f for f in fs.bounded if f.degree > 3]
    assert len(big) == 1
    hole = big[0]
    tip_id = int(np.flatnonzero(np.all(np.isclose(g.coords, [1, 0]), axis=1))[0])
    anchor_id = int(np.flatnonzero(np.all(np.isclose(g.coords, [2, 0]), axis=1))[0])
    assert g.degree[tip_id] == 1
    assert hole.vertices.count(anchor_id) == 2
    assert hole.degree == len(set(hole.vertices)) + 1
    # oracle: the radius-3 hexagon holds 54 unit triangles; the remaining
    # triangles are the mutually tangent triples, found by brute force
    e = {tuple(x) for x in g.edges().tolist()}
    n = g.n_vertices
    triples = sum(1 for i in range(n) for j in range(i + 1, n) if (i, j) in e
                  for k in range(j + 1, n) if (i, k) in e and (j, k) in e)
    expected = (54 - triples) * TRI
    np.testing.assert_allclose(walk_area(face_polygon(g, hole)), expected, rtol=1e-12)
    outer = next(f for f in fs.faces if f.outer)
    np.testing.assert_allclose(walk_area(g.coords[list(outer.vertices)]), -54 * TRI, rtol=1e-12)


def test_bowtie_outer_walk():
    g = build_contact_graph(bowtie_packing())
    fs = trace_faces(g)
    _check_invariants(g, fs)
    outer = next(f for f in fs.faces if f.outer)
    assert outer.degree == 6
    cut = int(np.flatnonzero(np.all(np.isclose(g.coords, [1, 0]), axis=1))[0])
    assert outer.vertices.count(cut) == 2
    # both lobes, traversed clockwise
    np.testing.assert_allclose(walk_area(g.coords[list(outer.vertices)]), -2 * TRI, rtol=1e-12)
    assert fs.D == 3


@pytest.mark.parametrize("seed", range(5))
def test_random_corpus_invariants(seed):
    g = build_contact_graph(generate_random_subset(8, 0.8, 40, seed, retry_budget=50))
    fs = trace_faces(g)
    _check_invariants(g, fs)
    # bounded faces tile the region enclosed by the outer walk
    outer = next(f for f in fs.faces if f.outer)
    inside = sum(walk_area(face_polygon(g, f)) for f in fs.bounded)
    np.testing.assert_allclose(inside, -walk_area(g.coords[list(outer.vertices)]), rtol=1e-9)


def test_multi_component_euler():
    pk = DiskPacking([[0, 0], [1, 0], [0.5, SQRT3 / 2], [10, 0], [11, 0], [30, 30]])
    g = build_contact_graph(pk)
    fs = trace_faces(g)
    assert g.n_components == 3
    _check_invariants(g, fs)


def test_outer_boundary_matches_trace(random_corpus):
    for g in random_corpus:
        fs = trace_faces(g)
        expect = np.unique([v for f in fs.faces if f.outer for v in f.vertices])
        np.testing.assert_array_equal(outer_boundary(g), expect)


def test_face_report_format(hex_flower):
    doc = faces_to_dict(hex_flower, trace_faces(hex_flower))
    assert doc["D"] == 3
    assert set(doc["faces"][0]) == {"degree", "area", "outer", "walk"}
    assert sum(f["outer"] for f in doc["faces"]) == 1


def test_square_window_faces():
    g = build_contact_graph(generate_lattice("square", 5))
    fs = trace_faces(g)
    assert len(fs.bounded) == 100 and fs.D == 4
    _check_invariants(g, fs)
