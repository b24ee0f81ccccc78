"""Diagonal triangulations of penny-graph faces.

A face is given as its closed walk of corners (counterclockwise, interior on
the left). Corners may repeat a vertex: a pendant edge is walked twice and a
cut vertex appears once per visit. Triangles use only face edges and
diagonal segments, i.e. chords inside the closed face that meet the vertex
set only at their endpoints. No Steiner points are added.

The recursion clips ears (convex corners whose closing chord is a diagonal
and whose triangle holds no other vertex). Among the available ears the
default policy takes the one whose triangle has the largest minimum angle.
If no corner has a clean ear, the polygon is split along the segment from a
convex corner to the nearest vertex inside its ear triangle.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .contact import PennyGraph
from .faces import FaceSet, GeometryError, walk_area

__all__ = [
    "Triangle",
    "Triangulation",
    "triangulate_face",
    "triangulate_corners",
    "optimal_triangulation",
    "triangle_angles",
    "triangulate_window",
    "quality_report",
    "is_diagonal",
    "face_area_residuals",
    "mesh_to_dict",
]

EPS = 1e-9
TWO_PI = 2 * np.pi


@dataclass(frozen=True)
class Triangle:
    vertices: tuple
    coords: np.ndarray
    angles: np.ndarray
    lengths: np.ndarray
    face: int = -1


def triangle_angles(p) -> np.ndarray:
    """Interior angles of triangle ``p`` (shape ``(..., 3, 2)``), at each corner."""
    p = np.asarray(p, dtype=float)
    out = np.empty(p.shape[:-1])
    for k in range(3):
        a = p[..., (k + 1) % 3, :] - p[..., k, :]
        b = p[..., (k + 2) % 3, :] - p[..., k, :]
        cross = a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
        dot = np.sum(a * b, axis=-1)
        out[..., k] = np.arctan2(np.abs(cross), dot)
    return out


def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _angle(v) -> float:
    return float(np.arctan2(v[1], v[0]))


class _Poly:
    """Corner list of a (sub)polygon over the face's corner arrays."""

    def __init__(self, pts, ids, corners):
        self.pts = pts
        self.ids = ids
        self.c = list(corners)

    def __len__(self):
        return len(self.c)

    def prev(self, k):
        return self.c[k - 1]

    def next(self, k):
        return self.c[(k + 1) % len(self.c)]

    def interior_angle(self, k) -> float:
        v, p, n = self.c[k], self.prev(k), self.next(k)
        if self.ids[p] == self.ids[n]:
            return TWO_PI
        P, V, N = self.pts[p], self.pts[v], self.pts[n]
        a = np.mod(_angle(P - V) - _angle(N - V), TWO_PI)
        return a if a > 0 else TWO_PI

    def in_wedge(self, k, direction) -> bool:
        """Whether ``direction`` leaves corner ``k`` strictly into the interior."""
        v, n = self.c[k], self.next(k)
        alpha = self.interior_angle(k)
        beta = np.mod(_angle(direction) - _angle(self.pts[n] - self.pts[v]), TWO_PI)
        return EPS < beta < alpha - EPS

    def edges(self):
        c = self.c
        return [(c[i], c[(i + 1) % len(c)]) for i in range(len(c))]


def _winding_number(pts, corners, q) -> int:
    wn = 0
    m = len(corners)
    for i in range(m):
        a = pts[corners[i]]
        b = pts[corners[(i + 1) % m]]
        if a[1] <= q[1]:
            if b[1] > q[1] and _orient(a, b, q) > 0:
                wn += 1
        elif b[1] <= q[1] and _orient(a, b, q) < 0:
            wn -= 1
    return wn


def _segment_clear(pts, ids, corners, a, b, skip_ids) -> bool:
    """No corner other than ``skip_ids`` within ``EPS`` of the closed segment ``ab``."""
    P = pts[a]
    d = pts[b] - P
    L2 = float(d @ d)
    for c in corners:
        if ids[c] in skip_ids:
            continue
        w = pts[c] - P
        t = min(1.0, max(0.0, float(w @ d) / L2))
        r = w - t * d
        if float(r @ r) <= EPS * EPS:
            return False
    return True


def _chord_valid(poly: _Poly, i, j) -> bool:
    """Whether the chord between corner positions ``i`` and ``j`` is a diagonal."""
    pts, ids = poly.pts, poly.ids
    a, b = poly.c[i], poly.c[j]
    ia, ib = ids[a], ids[b]
    if ia == ib:
        return False
    edges = poly.edges()
    for e0, e1 in edges:
        if {ids[e0], ids[e1]} == {ia, ib}:
            return False
    A, B = pts[a], pts[b]
    if not (poly.in_wedge(i, B - A) and poly.in_wedge(j, A - B)):
        return False
    if not _segment_clear(pts, ids, poly.c, a, b, (ia, ib)):
        return False
    for e0, e1 in edges:
        if ids[e0] in (ia, ib) or ids[e1] in (ia, ib):
            continue
        C, D = pts[e0], pts[e1]
        if (_orient(A, B, C) * _orient(A, B, D) < 0
                and _orient(C, D, A) * _orient(C, D, B) < 0):
            return False
    return _winding_number(pts, poly.c, 0.5 * (A + B)) != 0


def _ear_empty(poly: _Poly, k) -> bool:
    pts, ids = poly.pts, poly.ids
    w, v, u = poly.prev(k), poly.c[k], poly.next(k)
    W, V, U = pts[w], pts[v], pts[u]
    skip = (ids[w], ids[v], ids[u])
    for c in poly.c:
        if ids[c] in skip:
            continue
        p = pts[c]
        if (_orient(W, V, p) >= -EPS and _orient(V, U, p) >= -EPS
                and _orient(U, W, p) >= -EPS):
            return False
    return True


def is_diagonal(points, ids, i, j) -> bool:
    """Diagonal test for corners ``i`` and ``j`` of a closed counterclockwise walk."""
    pts = np.asarray(points, dtype=float)
    ids = list(range(len(pts))) if ids is None else list(ids)
    return _chord_valid(_Poly(pts, ids, range(len(pts))), i, j)


def _convex(poly, k) -> bool:
    return poly.interior_angle(k) < np.pi - EPS


def _clip(poly, policy, out, log):
    while len(poly) > 3:
        ears = []
        for k in range(len(poly)):
            if not _convex(poly, k):
                continue
            if not _ear_empty(poly, k):
                continue
            m = len(poly)
            if not _chord_valid(poly, (k - 1) % m, (k + 1) % m):
                continue
            tri = poly.pts[[poly.prev(k), poly.c[k], poly.next(k)]]
            ears.append((float(triangle_angles(tri).min()), k))
            if policy == "first":
                break
        if ears:
            best = max(q for q, _ in ears)
            k = next(k for q, k in ears if q >= best - 1e-12)
            out.append((poly.prev(k), poly.c[k], poly.next(k)))
            log.append(("ear", poly.c[k]))
            del poly.c[k]
            continue
        _split(poly, policy, out, log)
        return
    if len(poly) == 3:
        out.append(tuple(poly.c))


def _split(poly, policy, out, log):
    pts, ids = poly.pts, poly.ids
    m = len(poly)
    for k in range(m):
        if not _convex(poly, k):
            continue
        w, v, u = poly.prev(k), poly.c[k], poly.next(k)
        W, V, U = pts[w], pts[v], pts[u]
        inside = []
        for j, c in enumerate(poly.c):
            if ids[c] in (ids[v],):
                continue
            if ids[c] in (ids[w], ids[u]) and j in ((k - 1) % m, (k + 1) % m):
                continue
            p = pts[c]
            if (_orient(W, V, p) >= -EPS and _orient(V, U, p) >= -EPS
                    and _orient(U, W, p) >= -EPS):
                inside.append((float(np.linalg.norm(p - V)), j))
        if not inside:
            continue
        inside.sort()
        dmin = inside[0][0]
        for dist, j in inside:
            if dist > dmin + EPS:
                break
            if _chord_valid(poly, k, j):
                lo, hi = (k, j) if k < j else (j, k)
                first = _Poly(pts, ids, poly.c[lo:hi + 1])
                second = _Poly(pts, ids, poly.c[hi:] + poly.c[:lo + 1])
                log.append(("split", poly.c[k], poly.c[j]))
                _clip(first, policy, out, log)
                _clip(second, policy, out, log)
                return
    raise GeometryError(
        "no ear or split diagonal found for polygon "
        f"ids={[ids[c] for c in poly.c]} pts={pts[poly.c].tolist()}"
    )


def triangulate_corners(points, ids=None, policy: str = "greedy"):
    """Diagonal triangulation of a closed counterclockwise walk.

    Parameters
    ----------
    points : array_like, shape (n, 2)
        Corner coordinates in walk order.
    ids : sequence of int, optional
        Vertex labels; equal labels mark a repeated vertex. Defaults to
        ``range(n)``.
    policy : {"greedy", "first"}
        ``greedy`` clips the ear with the largest minimum angle, ``first``
        the first clean ear in walk order.

    Returns
    -------
    triangles : ndarray, shape (n - 2, 3)
        Corner positions (indices into ``points``) of each triangle, each
        listed counterclockwise.
    log : list
        The sequence of ear clips and splits taken.
    """
    if policy not in ("greedy", "first"):
        raise ValueError(f"unknown policy {policy!r}")
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    ids = list(range(n)) if ids is None else [int(i) for i in ids]
    if n < 3:
        raise GeometryError("a face needs at least three corners")
    out, log = [], []
    _clip(_Poly(pts, ids, range(n)), policy, out, log)
    tris = np.asarray(out, dtype=np.int64).reshape(-1, 3)
    if len(tris) != n - 2:
        raise GeometryError(f"expected {n - 2} triangles, got {len(tris)}")
    return tris, log


def triangulate_face(points, ids=None, policy: str = "greedy", face: int = -1) -> list:
    """Triangulate one face walk and return :class:`Triangle` records."""
    pts = np.asarray(points, dtype=float)
    labels = list(range(len(pts))) if ids is None else list(ids)
    tris, _ = triangulate_corners(pts, labels, policy)
    out = []
    for t in tris:
        p = pts[t]
        out.append(Triangle(tuple(labels[i] for i in t), p, triangle_angles(p),
                            np.linalg.norm(p - np.roll(p, -1, axis=0), axis=1), face))
    return out


def _classic_diagonal(pts, i, j) -> bool:
    # simple polygons only: cone test at both ends plus no contact with non-incident edges
    n = len(pts)

    def in_cone(a, b):
        a0, a1 = pts[(a - 1) % n], pts[(a + 1) % n]
        A, B = pts[a], pts[b]
        if _orient(a0, A, a1) > 0:
            return _orient(A, B, a0) > 0 and _orient(B, A, a1) > 0
        return not (_orient(A, B, a1) >= 0 and _orient(B, A, a0) >= 0)

    if not (in_cone(i, j) and in_cone(j, i)):
        return False
    A, B = pts[i], pts[j]
    for k in range(n):
        k1 = (k + 1) % n
        if k in (i, j) or k1 in (i, j):
            continue
        C, D = pts[k], pts[k1]
        o1, o2 = _orient(A, B, C), _orient(A, B, D)
        o3, o4 = _orient(C, D, A), _orient(C, D, B)
        if o1 * o2 <= 0 and o3 * o4 <= 0:
            return False
    return True


def optimal_triangulation(points):
    """Max-min-angle diagonal triangulation of a simple polygon by dynamic programming.

    Exhaustive over all diagonal triangulations; intended as a reference for
    faces with a simple boundary and at most 12 corners.

    Returns
    -------
    min_angle : float
    triangles : ndarray, shape (n - 2, 3)
    """
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    if n > 12:
        raise ValueError("optimal_triangulation is limited to 12 corners")
    ok = np.zeros((n, n), dtype=bool)
    for i in range(n):
        ok[i, (i + 1) % n] = ok[(i + 1) % n, i] = True
        for j in range(i + 2, n):
            if (i, j) != (0, n - 1) and _classic_diagonal(pts, i, j):
                ok[i, j] = ok[j, i] = True

    @lru_cache(maxsize=None)
    def best(i, j):
        if j - i < 2:
            return np.inf, ()
        top, arg = -np.inf, None
        for k in range(i + 1, j):
            if not (ok[i, k] and ok[k, j]):
                continue
            q = triangle_angles(pts[[i, k, j]]).min()
            l, lt = best(i, k)
            r, rt = best(k, j)
            if lt is None or rt is None:
                continue
            val = min(q, l, r)
            if val > top:
                top, arg = val, lt + rt + ((i, k, j),)
        return top, arg if arg is not None else None

    q, tris = best(0, n - 1)
    if tris is None:
        raise GeometryError("polygon admits no diagonal triangulation")
    return float(q), np.asarray(tris, dtype=np.int64)


class Triangulation:
    """Associated triangulation of a penny-graph window.

    Attributes
    ----------
    coords : ndarray, shape (n, 2)
        Vertex coordinates (shared with the graph).
    triangles : ndarray, shape (m, 3)
        Vertex ids of each triangle, counterclockwise.
    face_of_triangle : ndarray, shape (m,)
        Index of the owning face in the face set.
    face_degree : ndarray, shape (m,)
        Facial degree of the owning face.
    angles, lengths : ndarray, shape (m, 3)
        Angle at corner ``k`` and length of the side from corner ``k`` to
        corner ``k + 1``.
    """

    def __init__(self, coords, triangles, face_of_triangle, face_degree, policy,
                 tolerance=EPS):
        self.coords = coords
        self.triangles = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
        self.face_of_triangle = np.asarray(face_of_triangle, dtype=np.int64)
        self.face_degree = np.asarray(face_degree, dtype=np.int64)
        self.policy = policy
        self.tolerance = tolerance
        p = coords[self.triangles]
        self.angles = triangle_angles(p)
        self.lengths = np.linalg.norm(p - np.roll(p, -1, axis=1), axis=2)
        e1, e2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
        self.areas = 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
        self._build_grid()

    def __len__(self):
        return len(self.triangles)

    @property
    def min_angle(self) -> float:
        return float(self.angles.min()) if len(self) else float("nan")

    @property
    def edge_range(self) -> tuple:
        if not len(self):
            return (float("nan"), float("nan"))
        return float(self.lengths.min()), float(self.lengths.max())

    def triangle(self, t: int) -> Triangle:
        return Triangle(tuple(self.triangles[t].tolist()), self.coords[self.triangles[t]],
                        self.angles[t], self.lengths[t], int(self.face_of_triangle[t]))

    def triangles_of_face(self, face: int) -> np.ndarray:
        return np.flatnonzero(self.face_of_triangle == face)

    def edges(self) -> np.ndarray:
        """Unique undirected mesh edges ``(i, j)``, ``i < j``."""
        t = self.triangles
        e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        e.sort(axis=1)
        return np.unique(e, axis=0)

    def _build_grid(self):
        p = self.coords[self.triangles] if len(self) else np.zeros((0, 3, 2))
        lo = np.floor(p.min(axis=1)).astype(np.int64)
        hi = np.floor(p.max(axis=1)).astype(np.int64)
        grid = defaultdict(list)
        for t in range(len(self)):
            for ix in range(lo[t, 0], hi[t, 0] + 1):
                for iy in range(lo[t, 1], hi[t, 1] + 1):
                    grid[(ix, iy)].append(t)
        self._grid = dict(grid)

    def candidates(self, point) -> list:
        ix, iy = int(np.floor(point[0])), int(np.floor(point[1]))
        return self._grid.get((ix, iy), [])

    def locate(self, point, tol: float = 1e-12):
        """Lowest-id triangle containing ``point`` and its barycentric weights.

        Returns ``(-1, None)`` when the point is outside the mesh.
        """
        q = np.asarray(point, dtype=float)
        for t in sorted(self.candidates(q)):
            a, b, c = self.coords[self.triangles[t]]
            det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            l1 = ((q[0] - a[0]) * (c[1] - a[1]) - (q[1] - a[1]) * (c[0] - a[0])) / det
            l2 = ((b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0])) / det
            lam = np.array([1.0 - l1 - l2, l1, l2])
            if lam.min() >= -tol:
                return t, lam
        return -1, None


def triangulate_window(g: PennyGraph, faces: FaceSet, policy: str = "greedy") -> Triangulation:
    """Triangulate every bounded face and merge the results.

    Faces with identical shape up to translation share one corner pattern,
    which keeps lattice windows cheap.

    Raises
    ------
    ValueError
        The graph has more than one component (a component nested inside a
        face of another would leave that face non-simply-connected).
    GeometryError
        Propagated from the per-face triangulation.
    """
    if g.n_components > 1:
        raise ValueError("triangulate_window expects a connected graph")
    cache = {}
    tris, owner, degs = [], [], []
    for fid, f in enumerate(faces.faces):
        if f.outer:
            continue
        ids = np.asarray(f.vertices)
        pts = g.coords[ids]
        rel = np.round(pts - pts[0], 9)
        # repeated vertices must match too, so the label pattern is part of the key
        _, pattern = np.unique(ids, return_inverse=True)
        key = (rel.tobytes(), pattern.tobytes())
        if key not in cache:
            cache[key] = triangulate_corners(pts, ids, policy)[0]
        tris.append(ids[cache[key]])
        owner.append(np.full(len(cache[key]), fid))
        degs.append(np.full(len(cache[key]), f.degree))
    if tris:
        tris, owner, degs = np.concatenate(tris), np.concatenate(owner), np.concatenate(degs)
    else:
        tris, owner, degs = np.zeros((0, 3), np.int64), np.zeros(0, np.int64), np.zeros(0, np.int64)
    return Triangulation(g.coords, tris, owner, degs, policy, g.tolerance)


def quality_report(t: Triangulation, D: int) -> dict:
    """Angle and edge-length certificate of a triangulation.

    Every edge must have length in ``[1 - tol, D]``. Violations are listed,
    never raised. ``by_degree`` tabulates, for each facial degree, the
    smallest angle, the longest edge, and ``max(1/min_angle, max_edge)`` as
    an empirical candidate for the constant bounding both.
    """
    lo_ok = t.lengths >= 1.0 - t.tolerance
    hi_ok = t.lengths <= D + t.tolerance
    bad = np.flatnonzero(~(lo_ok & hi_ok).all(axis=1))
    by_degree = {}
    for d in np.unique(t.face_degree):
        sel = t.face_degree == d
        amin = float(t.angles[sel].min())
        lmax = float(t.lengths[sel].max())
        by_degree[int(d)] = {
            "faces": int(len(np.unique(t.face_of_triangle[sel]))),
            "min_angle": amin,
            "max_edge": lmax,
            "C_candidate": max(1.0 / amin, lmax),
        }
    lo, hi = t.edge_range
    return {
        "D": int(D),
        "triangles": len(t),
        "min_angle": t.min_angle,
        "edge_min": lo,
        "edge_max": hi,
        "violations": [int(i) for i in bad],
        "ok": not len(bad),
        "by_degree": by_degree,
    }


def face_area_residuals(g: PennyGraph, faces: FaceSet, t: Triangulation) -> np.ndarray:
    """Relative gap between each bounded face's shoelace area and its triangles' total."""
    out = []
    sums = np.bincount(t.face_of_triangle, weights=t.areas, minlength=len(faces.faces))
    for fid, f in enumerate(faces.faces):
        if f.outer:
            continue
        a = walk_area(g.coords[list(f.vertices)])
        out.append(abs(sums[fid] - a) / abs(a))
    return np.asarray(out)


def mesh_to_dict(t: Triangulation) -> dict:
    return {
        "vertices": t.coords.tolist(),
        "triangles": t.triangles.tolist(),
        "face_of_triangle": t.face_of_triangle.tolist(),
    }
