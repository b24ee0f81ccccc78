"""Numerical dimension of polynomial-growth harmonic spaces on a window.

Candidates are harmonic extensions, from the sphere of radius ``R_out``
around ``x0``, of low-frequency boundary data ``1, cos(m t), sin(m t)``
(``m <= M``), optionally joined by extra user-supplied probes. For each
radius ``R`` the Gram matrices of the candidates over the regions of radius
``R`` and ``beta R`` form a pencil; a generalized eigenvalue ``lam`` is the
growth factor ``A_{beta R}(w, w) / A_R(w, w)`` of an extremal combination
``w``. A function of growth rate ``k`` has ``lam`` close to
``beta^(2k + 2)`` in the plane, so eigenvalues at most
``beta^(2k + 2 + delta)`` are counted as members of the rate-``k`` space.
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .contact import PennyGraph, ball, bfs_distances, vertex_boundary
from .extend import disk_mass_matrix, ngon_area
from .faces import trace_faces, window_margin
from .field import solve_dirichlet
from .triangulate import Triangulation, triangulate_window

__all__ = [
    "RANK_TOL",
    "NULL_NORM",
    "GramPencil",
    "DimensionReport",
    "boundary_probe_basis",
    "build_pencil",
    "pencil_eigenvalues",
    "estimate_dim",
]

RANK_TOL = 1e-10
NULL_NORM = 1e-20
WINDOW_GUARD = 4


def boundary_probe_basis(g: PennyGraph, x0: int, R_out: int, M: int):
    """Trigonometric boundary data on the vertex boundary of ``B_{R_out}(x0)``.

    Returns
    -------
    boundary : ndarray of int
        Sorted boundary vertex ids.
    data : ndarray, shape (2M + 1, len(boundary))
        Rows ``1, cos(t), sin(t), ..., cos(M t), sin(M t)`` where ``t`` is the
        angle of each boundary vertex around ``x0``.

    Raises
    ------
    ValueError
        The ball is closer than 2 to the window's outer face, or the boundary
        has fewer than ``2M + 1`` vertices.
    """
    if window_margin(g, x0) < R_out + 2:
        raise ValueError(f"B_{R_out}({x0}) is not inside the window with margin 2")
    boundary = vertex_boundary(g, ball(g, x0, R_out))
    if len(boundary) < 2 * M + 1:
        raise ValueError(f"boundary has {len(boundary)} vertices, need {2 * M + 1}")
    d = g.coords[boundary] - g.coords[x0]
    theta = np.arctan2(d[:, 1], d[:, 0])
    rows = [np.ones(len(boundary))]
    for m in range(1, M + 1):
        rows += [np.cos(m * theta), np.sin(m * theta)]
    return boundary, np.array(rows)


@dataclass(frozen=True)
class GramPencil:
    """Gram matrices of one candidate set over two radii.

    ``inner[i, j] = A_R(u_i, u_j)`` and ``outer[i, j] = A_{beta R}(u_i, u_j)``.
    """

    R: float
    beta: float
    mode: str
    x0: int
    R_solve: int
    labels: list
    inner: np.ndarray
    outer: np.ndarray
    fields: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.labels)


def _planar_solve_radius(g, mesh, x0, rho):
    # smallest graph ball holding every mesh vertex of triangles that can meet D_rho
    reach = rho + float(mesh.lengths.max())
    near = np.flatnonzero(np.linalg.norm(g.coords - g.coords[x0], axis=1) <= reach)
    d = bfs_distances(g, [x0])
    return int(d[near].max())


def _solve_all(g, omega, data, threads):
    def one(row):
        return solve_dirichlet(g, omega, row).values

    if threads and threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            return np.array(list(ex.map(one, data)))
    return np.array([one(row) for row in data])


def build_pencil(g: PennyGraph, x0: int, k: int, R: float, beta: float = 2.0,
                 M: int | None = None, mode: str = "discrete", extra_probes=None,
                 mesh: Triangulation | None = None, threads: int = 1) -> GramPencil:
    """Solve for the candidate harmonic fields and assemble their Gram pencil.

    Parameters
    ----------
    g : PennyGraph
    x0 : int
        Base vertex; planar regions are disks around its position.
    k : int
        Growth rate being probed; sets the default ``M = 2k + 4``.
    R : float
        Inner radius; the outer radius is ``beta * R``.
    M : int, optional
        Highest boundary frequency, at least ``2k + 4``.
    mode : {"discrete", "planar"}
        ``discrete`` sums over graph balls ``B_R`` and ``B_{beta R}``;
        ``planar`` integrates the piecewise-linear extensions over disks.
    extra_probes : dict of name -> callable, optional
        Additional boundary data ``h(coords) -> values``.
    mesh : Triangulation, optional
        Associated triangulation for planar mode (built if omitted).
    threads : int
        Worker threads for the independent Dirichlet solves.
    """
    if M is None:
        M = 2 * k + 4
    if mode not in ("discrete", "planar"):
        raise ValueError(f"unknown mode {mode!r}")
    rho = beta * R
    if mode == "discrete":
        R_solve = int(np.ceil(rho))
    else:
        if mesh is None:
            mesh = triangulate_window(g, trace_faces(g))
        R_solve = _planar_solve_radius(g, mesh, x0, rho)
    if window_margin(g, x0) < R_solve + WINDOW_GUARD:
        raise ValueError(f"solve radius {R_solve} too close to the window edge")

    boundary, data = boundary_probe_basis(g, x0, R_solve, M)
    labels = ["1"] + [f"{t}{m}" for m in range(1, M + 1) for t in ("cos", "sin")]
    if extra_probes:
        coords = g.coords[boundary]
        rows = [np.asarray(h(coords), dtype=float) for h in extra_probes.values()]
        data = np.vstack([data] + rows)
        labels += list(extra_probes)
    omega = ball(g, x0, R_solve)
    U = _solve_all(g, omega, data, threads)

    if mode == "discrete":
        d = bfs_distances(g, [x0], max_depth=R_solve)
        Ui = U[:, (d >= 0) & (d <= R)]
        Uo = U[:, (d >= 0) & (d <= rho)]
        inner, outer = Ui @ Ui.T, Uo @ Uo.T
    else:
        c = g.coords[x0]
        Mi, cov_i = disk_mass_matrix(mesh, c, R)
        Mo, cov_o = disk_mass_matrix(mesh, c, rho)
        if abs(cov_o - ngon_area(rho)) > 1e-9 * ngon_area(rho):
            raise ValueError("outer disk not covered by the mesh")
        inner = U @ (Mi @ U.T)
        outer = U @ (Mo @ U.T)
    inner = 0.5 * (inner + inner.T)
    outer = 0.5 * (outer + outer.T)
    keep = np.diag(outer) >= NULL_NORM
    labels = [lab for lab, kp in zip(labels, keep) if kp]
    return GramPencil(float(R), float(beta), mode, int(x0), R_solve, labels,
                      inner[np.ix_(keep, keep)], outer[np.ix_(keep, keep)], U[keep])


def pencil_eigenvalues(pencil: GramPencil, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Generalized eigenvalues of ``outer w = lam inner w``, ascending.

    The problem is solved in the reciprocal form ``inner w = mu outer w`` on
    the range of ``outer`` (eigenvalues below ``rank_tol`` times the largest
    are discarded), so fast-growing directions come out as ``mu -> 0`` and
    ``lam = 1 / mu`` is reported as ``inf`` when ``mu <= 0``.
    """
    live = np.diag(pencil.outer) >= NULL_NORM
    if not live.any():
        return np.empty(0)
    s = np.sqrt(np.diag(pencil.outer)[live])
    Go = pencil.outer[np.ix_(live, live)] / np.outer(s, s)
    Gi = pencil.inner[np.ix_(live, live)] / np.outer(s, s)
    w, Q = np.linalg.eigh(Go)
    keep = w > rank_tol * w.max()
    if not keep.any():
        return np.empty(0)
    W = Q[:, keep] / np.sqrt(w[keep])
    S = W.T @ Gi @ W
    mu = np.linalg.eigvalsh(0.5 * (S + S.T))[::-1]
    with np.errstate(divide="ignore"):
        lam = np.where(mu > 0, 1.0 / np.where(mu > 0, mu, 1.0), np.inf)
    return lam


@dataclass
class DimensionReport:
    k: int
    beta: float
    delta: float
    rank_tol: float
    threshold: float
    schedule: list
    estimate: int | None
    counts: list

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "beta": self.beta,
            "delta": self.delta,
            "rank_tol": self.rank_tol,
            "threshold": self.threshold,
            "schedule": self.schedule,
            "counts": self.counts,
            "estimate": self.estimate,
        }


def estimate_dim(pencils, k: int, delta: float = 0.5, rank_tol: float = RANK_TOL) -> DimensionReport:
    """Count slowly growing directions in each pencil and take the modal count.

    An eigenvalue counts when it is at most ``beta^(2k + 2 + delta)``. Ties
    between equally frequent counts go to the largest radius. Pencils whose
    outer Gram matrix is numerically zero contribute no count; if none
    remains the estimate is ``None``.
    """
    pencils = list(pencils)
    betas = {p.beta for p in pencils}
    if len(betas) != 1:
        raise ValueError("all pencils must share beta")
    beta = betas.pop()
    threshold = float(beta ** (2 * k + 2 + delta))
    schedule, counts = [], []
    for p in pencils:
        lam = pencil_eigenvalues(p, rank_tol)
        entry = {"R": p.R, "mode": p.mode, "size": p.size,
                 "eigenvalues": [float(x) for x in lam]}
        if len(lam):
            c = int(np.sum(lam <= threshold))
            entry["count"] = c
            above = lam[lam > threshold]
            entry["separation"] = float(above[0] / threshold) if len(above) else None
            counts.append((c, p.R))
        else:
            entry["count"] = None
        schedule.append(entry)
    estimate = None
    if counts:
        freq = Counter(c for c, _ in counts)
        top = max(freq.values())
        estimate = max(((r, c) for c, r in counts if freq[c] == top))[1]
    return DimensionReport(k, beta, delta, rank_tol, threshold, schedule, estimate,
                           [c for c, _ in counts])
