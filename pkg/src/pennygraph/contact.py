"""Contact (penny) graphs and their combinatorial metric."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sps
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .packing import DiskPacking, validate_packing

__all__ = [
    "PennyGraph",
    "InvalidPackingError",
    "build_contact_graph",
    "bfs_distances",
    "graph_distance",
    "ball",
    "sphere",
    "vertex_boundary",
    "nearest_vertex",
    "graph_to_dict",
]

UNREACHABLE = -1


class InvalidPackingError(ValueError):
    def __init__(self, report):
        super().__init__(f"packing has overlapping disks: {report.violations[:5]}"
                         f" (min distance {report.min_distance})")
        self.report = report


def _frozen(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PennyGraph:
    """Contact graph with its straight-line embedding.

    Adjacency is stored in CSR form: the neighbors of ``v`` are
    ``indices[indptr[v]:indptr[v+1]]``, sorted counterclockwise by the angle
    of the edge vector in ``[0, 2*pi)``. Position ``e`` in ``indices`` is the
    directed edge ``(tail[e], indices[e])``.
    """

    coords: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    component: np.ndarray
    tolerance: float

    @property
    def n_vertices(self) -> int:
        return len(self.coords)

    @property
    def n_edges(self) -> int:
        return len(self.indices) // 2

    @property
    def degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def n_components(self) -> int:
        return int(self.component.max()) + 1 if self.n_vertices else 0

    @property
    def tail(self) -> np.ndarray:
        return np.repeat(np.arange(self.n_vertices), self.degree)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def edges(self) -> np.ndarray:
        """Undirected edges as an ``(m, 2)`` array with ``i < j``, sorted."""
        t = self.tail
        keep = t < self.indices
        e = np.column_stack([t[keep], self.indices[keep]])
        return e[np.lexsort((e[:, 1], e[:, 0]))]

    def adjacency_matrix(self) -> sps.csr_matrix:
        n = self.n_vertices
        data = np.ones(len(self.indices))
        return sps.csr_matrix((data, self.indices, self.indptr), shape=(n, n))

    def reverse_edge(self) -> np.ndarray:
        """Position of ``(w, v)`` for every directed edge position of ``(v, w)``."""
        t = self.tail
        # directed edges keyed by (tail, head); the reversed key sorts the same set
        key = t.astype(np.int64) * self.n_vertices + self.indices
        rkey = self.indices.astype(np.int64) * self.n_vertices + t
        order = np.argsort(key)
        return order[np.searchsorted(key[order], rkey)]


def build_contact_graph(packing: DiskPacking) -> PennyGraph:
    """Contact graph of a valid packing.

    Disks ``i`` and ``j`` are adjacent iff ``| |c_i - c_j| - 1 | <= tol``.

    Raises
    ------
    InvalidPackingError
        Some disks overlap; the validation report is attached.
    """
    report = validate_packing(packing)
    if not report.ok:
        raise InvalidPackingError(report)
    c = packing.centers
    n = len(c)
    tol = packing.tolerance
    pairs = cKDTree(c).query_pairs(1.0 + tol, output_type="ndarray") if n > 1 else np.empty((0, 2), int)
    pairs = pairs.reshape(-1, 2)
    if len(pairs):
        d = np.linalg.norm(c[pairs[:, 0]] - c[pairs[:, 1]], axis=1)
        pairs = pairs[np.abs(d - 1.0) <= tol]
    src = np.concatenate([pairs[:, 0], pairs[:, 1]]).astype(np.int64)
    dst = np.concatenate([pairs[:, 1], pairs[:, 0]]).astype(np.int64)
    vec = c[dst] - c[src]
    ang = np.mod(np.arctan2(vec[:, 1], vec[:, 0]), 2 * np.pi)
    order = np.lexsort((ang, src))
    src, dst, ang = src[order], dst[order], ang[order]
    same = src[1:] == src[:-1]
    # two unit edges in one direction would force coincident centers
    assert not np.any(same & (np.diff(ang) <= 0)), "duplicate edge direction at a vertex"
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    indptr = np.cumsum(indptr)
    adj = sps.csr_matrix((np.ones(len(dst)), dst, indptr), shape=(n, n))
    _, comp = connected_components(adj, directed=False)
    return PennyGraph(_frozen(c.copy()), _frozen(indptr), _frozen(dst), _frozen(comp), tol)


def _gather_neighbors(g: PennyGraph, frontier: np.ndarray) -> np.ndarray:
    starts = g.indptr[frontier]
    counts = g.indptr[frontier + 1] - starts
    if counts.sum() == 0:
        return np.empty(0, dtype=np.int64)
    offs = np.repeat(starts - np.cumsum(counts) + counts, counts)
    return g.indices[offs + np.arange(counts.sum())]


def bfs_distances(g: PennyGraph, sources, max_depth: int | None = None) -> np.ndarray:
    """Graph distance from a source set; ``-1`` marks unreachable (or beyond ``max_depth``)."""
    dist = np.full(g.n_vertices, UNREACHABLE, dtype=np.int64)
    frontier = np.unique(np.atleast_1d(np.asarray(sources, dtype=np.int64)))
    if frontier.size and (frontier.min() < 0 or frontier.max() >= g.n_vertices):
        raise IndexError("vertex id out of range")
    dist[frontier] = 0
    depth = 0
    while frontier.size and (max_depth is None or depth < max_depth):
        nb = _gather_neighbors(g, frontier)
        nb = np.unique(nb[dist[nb] == UNREACHABLE])
        depth += 1
        dist[nb] = depth
        frontier = nb
    return dist


def _check_id(g, x):
    if not 0 <= int(x) < g.n_vertices:
        raise IndexError(f"vertex id {x} out of range")


def graph_distance(g: PennyGraph, x: int, y: int) -> int | None:
    """Length of a shortest edge path, or ``None`` across components."""
    _check_id(g, x)
    _check_id(g, y)
    if g.component[x] != g.component[y]:
        return None
    return int(bfs_distances(g, [x])[y])


def ball(g: PennyGraph, x0: int, R: int) -> np.ndarray:
    """Sorted ids of ``{y : d(y, x0) <= R}``."""
    _check_id(g, x0)
    if R < 0:
        raise ValueError("radius must be nonnegative")
    d = bfs_distances(g, [x0], max_depth=int(R))
    return np.flatnonzero(d >= 0)


def sphere(g: PennyGraph, x0: int, R: int) -> np.ndarray:
    """Sorted ids at exact distance ``R`` from ``x0``."""
    _check_id(g, x0)
    d = bfs_distances(g, [x0], max_depth=int(R))
    return np.flatnonzero(d == R)


def vertex_boundary(g: PennyGraph, omega) -> np.ndarray:
    """Vertices outside ``omega`` with a neighbor inside it."""
    omega = np.unique(np.asarray(omega, dtype=np.int64))
    inside = np.zeros(g.n_vertices, dtype=bool)
    inside[omega] = True
    nb = _gather_neighbors(g, omega)
    return np.unique(nb[~inside[nb]])


def nearest_vertex(g: PennyGraph, point) -> int:
    d = np.linalg.norm(g.coords - np.asarray(point, dtype=float), axis=1)
    return int(np.argmin(d))


def graph_to_dict(g: PennyGraph) -> dict:
    return {"vertices": g.coords.tolist(), "edges": g.edges().tolist()}
