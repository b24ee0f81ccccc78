"""Piecewise-linear extension of vertex fields over the associated triangulation.

Integrals of squares of the extension are exact on whole triangles. Disks
are replaced by their inscribed regular 64-gon; triangles crossing its
boundary are clipped and integrated with the edge-midpoint rule, which is
exact for quadratics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.sparse as sps

from .contact import PennyGraph, ball, nearest_vertex
from .field import HARMONIC_TOL, laplacian
from .triangulate import Triangulation

__all__ = [
    "NGON",
    "Disk",
    "Rect",
    "polygon_mass_matrix",
    "PLField",
    "pl_eval",
    "triangle_mass",
    "disk_mass_matrix",
    "integrate_pl_square",
    "trace_constant",
    "planar_mvi_ratio",
    "ngon_area",
]

NGON = 64
_LOCAL_MASS = (np.ones((3, 3)) + np.eye(3)) / 12.0


class Disk(NamedTuple):
    center: tuple
    radius: float


class Rect(NamedTuple):
    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def corners(self):
        return [(self.xmin, self.ymin), (self.xmax, self.ymin),
                (self.xmax, self.ymax), (self.xmin, self.ymax)]


def ngon_area(radius: float, n: int = NGON) -> float:
    return 0.5 * n * radius**2 * np.sin(2 * np.pi / n)


@dataclass(frozen=True)
class PLField:
    """A vertex field together with the triangulation it is extended over."""

    mesh: Triangulation
    values: np.ndarray
    graph: PennyGraph | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (len(self.mesh.coords),):
            raise ValueError("field length does not match the mesh vertices")
        object.__setattr__(self, "values", v)

    def coefficients(self) -> np.ndarray:
        """Per-triangle ``(a, b, c)`` with ``E(f)(x, y) = a + b x + c y``."""
        p = self.mesh.coords[self.mesh.triangles]
        f = self.values[self.mesh.triangles]
        A = np.concatenate([np.ones(p.shape[:2] + (1,)), p], axis=2)
        return np.linalg.solve(A, f[..., None])[..., 0]


def pl_eval(pl: PLField, point) -> float:
    """Value of the extension at a plane point.

    Raises
    ------
    ValueError
        The point lies outside the triangulated region.
    """
    t, lam = pl.mesh.locate(point)
    if t < 0:
        raise ValueError(f"point {tuple(point)} is outside the triangulated region")
    return float(lam @ pl.values[pl.mesh.triangles[t]])


def triangle_mass(area: float) -> np.ndarray:
    """Local matrix ``M`` with ``f^T M f = integral of E(f)^2`` over a triangle."""
    return area * _LOCAL_MASS


def _ngon(center, radius, n=NGON):
    """Half-planes ``normals @ x <= offsets`` of the inscribed regular n-gon."""
    k = np.arange(n)
    normals = np.column_stack([np.cos((2 * k + 1) * np.pi / n), np.sin((2 * k + 1) * np.pi / n)])
    return normals, normals @ np.asarray(center, dtype=float) + radius * np.cos(np.pi / n)


def _clip_halfplane(poly, nrm, b):
    out = []
    m = len(poly)
    for i in range(m):
        P, Q = poly[i], poly[(i + 1) % m]
        sp = P @ nrm - b
        sq = Q @ nrm - b
        if sp <= 0:
            out.append(P)
        if sp * sq < 0:
            out.append(P + (Q - P) * (sp / (sp - sq)))
    return out


def _halfplane_mass_matrix(mesh: Triangulation, normals, offsets):
    # mass matrix of E over the convex region {x : normals @ x <= offsets}
    n = len(mesh.coords)
    tri = mesh.triangles
    p = mesh.coords[tri]
    s = p @ normals.T - offsets  # (m, 3, k)
    outside_any = s > 0
    full = ~outside_any.any(axis=(1, 2))
    # a triangle entirely beyond one edge line misses the region
    gone = outside_any.all(axis=1).any(axis=1)
    partial = np.flatnonzero(~full & ~gone)

    rows, cols, vals = [], [], []
    idx = np.flatnonzero(full)
    if len(idx):
        loc = mesh.areas[idx, None, None] * _LOCAL_MASS
        rows.append(np.repeat(tri[idx], 3, axis=1).ravel())
        cols.append(np.tile(tri[idx], (1, 3)).ravel())
        vals.append(loc.ravel())
    covered = float(mesh.areas[idx].sum())

    for t in partial:
        poly = list(p[t])
        for k in np.flatnonzero(outside_any[t].any(axis=0)):
            poly = _clip_halfplane(poly, normals[k], offsets[k])
            if len(poly) < 3:
                break
        if len(poly) < 3:
            continue
        a, b, cc = p[t]
        det = (b[0] - a[0]) * (cc[1] - a[1]) - (b[1] - a[1]) * (cc[0] - a[0])
        loc = np.zeros((3, 3))
        P0 = poly[0]
        for i in range(1, len(poly) - 1):
            P1, P2 = poly[i], poly[i + 1]
            area = 0.5 * ((P1[0] - P0[0]) * (P2[1] - P0[1]) - (P1[1] - P0[1]) * (P2[0] - P0[0]))
            if area <= 0:
                continue
            covered += area
            # edge-midpoint rule, exact for quadratics
            for q in (0.5 * (P0 + P1), 0.5 * (P1 + P2), 0.5 * (P2 + P0)):
                l1 = ((q[0] - a[0]) * (cc[1] - a[1]) - (q[1] - a[1]) * (cc[0] - a[0])) / det
                l2 = ((b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0])) / det
                lam = np.array([1.0 - l1 - l2, l1, l2])
                loc += (area / 3.0) * np.outer(lam, lam)
        rows.append(np.repeat(tri[t], 3))
        cols.append(np.tile(tri[t], 3))
        vals.append(loc.ravel())

    if rows:
        M = sps.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                           shape=(n, n)).tocsr()
    else:
        M = sps.csr_matrix((n, n))
    return M, covered


def disk_mass_matrix(mesh: Triangulation, center, radius: float):
    """Sparse ``M`` with ``f^T M g = integral over the disk's 64-gon of E(f) E(g)``.

    Returns
    -------
    M : scipy.sparse.csr_matrix
    covered : float
        Area of the part of the 64-gon covered by the mesh.
    """
    return _halfplane_mass_matrix(mesh, *_ngon(center, radius))


def polygon_mass_matrix(mesh: Triangulation, vertices):
    """Like :func:`disk_mass_matrix` for a convex polygon given counterclockwise."""
    v = np.asarray(vertices, dtype=float)
    e = np.roll(v, -1, axis=0) - v
    normals = np.column_stack([e[:, 1], -e[:, 0]])
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    if np.any(e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0] < 0):
        raise ValueError("polygon must be convex and counterclockwise")
    return _halfplane_mass_matrix(mesh, normals, np.einsum("ij,ij->i", normals, v))


def integrate_pl_square(pl: PLField, region) -> float:
    """Integral of ``E(f)^2`` over a triangle (by id), a :class:`Disk` or a :class:`Rect`.

    Disks are integrated over their inscribed 64-gon; only the part of a
    region covered by the mesh counts, so an empty intersection gives 0.
    """
    if isinstance(region, Disk):
        M, _ = disk_mass_matrix(pl.mesh, region.center, region.radius)
        return float(pl.values @ (M @ pl.values))
    if isinstance(region, Rect):
        M, _ = polygon_mass_matrix(pl.mesh, region.corners())
        return float(pl.values @ (M @ pl.values))
    f = pl.values[pl.mesh.triangles[int(region)]]
    return float(pl.mesh.areas[int(region)] / 12.0 * (f.sum() ** 2 + f @ f))


def trace_constant(points) -> float:
    """Smallest ``C`` with ``sum f_i^2 <= C * integral of E(f)^2`` on a triangle.

    Computed as the reciprocal of the smallest eigenvalue of the 3x3 mass
    form; this equals ``12 / area``.
    """
    p = np.asarray(points, dtype=float)
    area = 0.5 * abs((p[1, 0] - p[0, 0]) * (p[2, 1] - p[0, 1]) - (p[1, 1] - p[0, 1]) * (p[2, 0] - p[0, 0]))
    if area <= 0:
        raise ValueError("degenerate triangle")
    return float(1.0 / np.linalg.eigvalsh(triangle_mass(area))[0])


def planar_mvi_ratio(pl: PLField, p, R: float, R1: float | None = None,
                     tol: float = HARMONIC_TOL) -> float:
    """``E(f)(p)^2 R^2 / integral over D_R(p) of E(f)^2`` for harmonic ``f``.

    Parameters
    ----------
    pl : PLField
        Must carry its graph, used for the harmonicity check.
    p : point
    R : float
        Disk radius; must be at least ``R1``.
    R1 : float, optional
        Smallest admissible radius, default ``4 * D`` with ``D`` the largest
        facial degree in the mesh.

    Raises
    ------
    ValueError
        ``R < R1``, the disk is not covered by the mesh, or ``f`` is not
        harmonic within graph distance ``ceil(2R)`` of the vertex nearest
        ``p``.
    """
    if pl.graph is None:
        raise ValueError("planar_mvi_ratio needs a PLField built with its graph")
    if R1 is None:
        R1 = 4 * int(pl.mesh.face_degree.max())
    if R < R1:
        raise ValueError(f"radius {R} below the admissible minimum {R1}")
    q = nearest_vertex(pl.graph, p)
    B = ball(pl.graph, q, int(np.ceil(2 * R)))
    lap = np.abs(laplacian(pl.graph, pl.values)[B]).max()
    if lap > tol:
        raise ValueError(f"field not harmonic near p: max |Lap f| = {lap:.3e}")
    M, covered = disk_mass_matrix(pl.mesh, p, R)
    full = ngon_area(R)
    if abs(covered - full) > 1e-9 * full:
        raise ValueError(f"disk of radius {R} not covered by the mesh ({covered} of {full})")
    den = float(pl.values @ (M @ pl.values))
    num = pl_eval(pl, p) ** 2
    if den == 0.0:
        return 0.0
    return num * R**2 / den
