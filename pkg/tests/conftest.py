import numpy as np
import pytest

from pennygraph import build_contact_graph, generate_lattice, trace_faces, triangulate_window
from pennygraph.packing import DiskPacking, generate_random_subset

SQRT3 = np.sqrt(3.0)


def spiked_hole_packing():
    """Hexagonal patch of radius 3 with a hole and one pendant disk poking in.

    The center, five of its six neighbors, and two of the sixth neighbor's
    outer neighbors are removed, so the remaining ring-1 disk hangs on a
    single contact and the hole's face walk visits its anchor twice.
    """
    c = generate_lattice("triangular", 3).centers
    r = np.linalg.norm(c, axis=1)
    tip = np.flatnonzero(np.isclose(c[:, 0], 1) & np.isclose(c[:, 1], 0))[0]
    ring1 = np.flatnonzero(np.isclose(r, 1))
    near_tip = np.isclose(np.linalg.norm(c - c[tip], axis=1), 1) & (r > 1.5)
    anchor = np.flatnonzero(np.isclose(c[:, 0], 2) & np.isclose(c[:, 1], 0))[0]
    drop = (r < 1e-9) | np.isin(np.arange(len(c)), ring1[ring1 != tip]) | (near_tip & (np.arange(len(c)) != anchor))
    return DiskPacking(c[~drop]), tip, anchor


def bowtie_packing():
    """Two unit triangles sharing the single vertex (1, 0)."""
    h = SQRT3 / 2
    return DiskPacking([[0, 0], [1, 0], [0.5, h], [2, 0], [1.5, -h]])


@pytest.fixture(scope="session")
def z2():
    return build_contact_graph(generate_lattice("square", 20))


@pytest.fixture(scope="session")
def tri_window():
    return build_contact_graph(generate_lattice("triangular", 12))


@pytest.fixture(scope="session")
def hex_flower():
    return build_contact_graph(generate_lattice("triangular", 1))


@pytest.fixture(scope="session")
def z2_mesh(z2):
    return triangulate_window(z2, trace_faces(z2))


@pytest.fixture(scope="session")
def random_corpus():
    """A few random subsets with bounded facial degree (the full 50 live in the acceptance suite)."""
    return [build_contact_graph(generate_random_subset(10, 0.9, 8, seed)) for seed in range(6)]


def center_vertex(g):
    return int(np.argmin(np.linalg.norm(g.coords, axis=1)))
