"""Scalar fields on vertices: Laplacian, Dirichlet problems, mean value ratios.

Fields are plain float arrays aligned with the graph's vertex order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sps
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import LinearOperator, cg

from .contact import PennyGraph, ball, vertex_boundary

__all__ = [
    "HARMONIC_TOL",
    "ConvergenceError",
    "DirichletResult",
    "laplacian",
    "laplacian_matrix",
    "solve_dirichlet",
    "discrete_mvi_ratio",
    "field_to_dict",
    "random_trig_data",
]

HARMONIC_TOL = 1e-8


class ConvergenceError(RuntimeError):
    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


def laplacian_matrix(g: PennyGraph) -> sps.csr_matrix:
    """Sparse combinatorial Laplacian ``A - diag(deg)``."""
    return (g.adjacency_matrix() - sps.diags(g.degree.astype(float))).tocsr()


def laplacian(g: PennyGraph, f) -> np.ndarray:
    """``(Lap f)(x) = sum over neighbors y of (f(y) - f(x))``."""
    f = np.asarray(f, dtype=float)
    if f.shape != (g.n_vertices,):
        raise ValueError(f"field has shape {f.shape}, graph has {g.n_vertices} vertices")
    return g.adjacency_matrix() @ f - g.degree * f


@dataclass(frozen=True)
class DirichletResult:
    """Solution of a Dirichlet problem.

    ``values`` covers every vertex; entries outside ``omega`` and
    ``boundary`` are zero.
    """

    values: np.ndarray
    omega: np.ndarray
    boundary: np.ndarray
    residual: float
    iterations: int


def _boundary_values(g, boundary, data):
    if callable(data):
        return np.asarray(data(g.coords[boundary]), dtype=float).reshape(len(boundary))
    data = np.asarray(data, dtype=float)
    if data.shape == (len(boundary),):
        return data
    if data.shape == (g.n_vertices,):
        return data[boundary]
    raise ValueError("boundary data must be callable, or sized to the boundary or the graph")


def solve_dirichlet(g: PennyGraph, omega, boundary_data, tol: float = 1e-10,
                    max_iter: int | None = None) -> DirichletResult:
    """Harmonic function on ``omega`` with prescribed values on its vertex boundary.

    Parameters
    ----------
    g : PennyGraph
    omega : array_like of int
        Interior vertex set.
    boundary_data : callable or array_like
        Either ``data(coords) -> values`` evaluated at the boundary vertices,
        an array aligned with ``vertex_boundary(g, omega)``, or a full-length
        field whose boundary entries are used.
    tol : float
        Required bound on ``max |Lap f|`` over ``omega``.
    max_iter : int, optional
        Conjugate-gradient iteration cap (default ``10 * len(omega) + 100``).

    Raises
    ------
    ValueError
        ``omega`` has no boundary, or part of it is not connected to the
        boundary (the interior system would be singular).
    ConvergenceError
        The residual bound was not reached.
    """
    omega = np.unique(np.asarray(omega, dtype=np.int64))
    boundary = vertex_boundary(g, omega)
    if len(boundary) == 0:
        raise ValueError("omega has an empty vertex boundary")
    gvals = _boundary_values(g, boundary, boundary_data)

    n = g.n_vertices
    pos = np.full(n, -1, dtype=np.int64)
    pos[omega] = np.arange(len(omega))
    A = g.adjacency_matrix()
    A_ii = A[omega][:, omega]
    A_ib = A[omega][:, boundary]
    touches = np.asarray(A_ib.sum(axis=1)).ravel() > 0
    ncomp, lab = connected_components(A_ii, directed=False)
    reached = np.zeros(ncomp, dtype=bool)
    reached[lab[touches]] = True
    if not reached.all():
        raise ValueError("part of omega is not connected to its boundary")

    deg = g.degree[omega].astype(float)
    K = (sps.diags(deg) - A_ii).tocsr()
    rhs = A_ib @ gvals
    Minv = LinearOperator(K.shape, matvec=lambda r: r / deg, dtype=float)
    if max_iter is None:
        max_iter = 10 * len(omega) + 100
    count = [0]

    def _tick(_):
        count[0] += 1

    x = rhs / deg
    atol = tol
    for _ in range(4):
        x, info = cg(K, rhs, x0=x, rtol=0.0, atol=atol, maxiter=max_iter, M=Minv,
                     callback=_tick)
        res = float(np.abs(rhs - K @ x).max())
        if res <= tol:
            break
        # the 2-norm stopping rule can undershoot in max norm only by roundoff; tighten once more
        atol = max(atol * 0.1, 1e-300)
    if res > tol:
        raise ConvergenceError(f"CG stopped at max residual {res:.3e} > {tol:.1e}", res)

    values = np.zeros(n)
    values[omega] = x
    values[boundary] = gvals
    values.setflags(write=False)
    return DirichletResult(values, omega, boundary, res, count[0])


def discrete_mvi_ratio(g: PennyGraph, f, p: int, r: int, tol: float = HARMONIC_TOL) -> float:
    """``f(p)^2 |B_r(p)| / sum_{B_r(p)} f^2`` for ``f`` harmonic on the ball.

    Returns 0 when ``f`` vanishes on the ball.

    Raises
    ------
    ValueError
        ``f`` is not harmonic (to ``tol``) on ``B_r(p)``.
    """
    f = np.asarray(f, dtype=float)
    B = ball(g, p, r)
    lap = laplacian(g, f)[B]
    if np.abs(lap).max() > tol:
        raise ValueError(f"field is not harmonic on B_{r}({p}): max |Lap f| = {np.abs(lap).max():.3e}")
    den = float(np.sum(f[B] ** 2))
    if den == 0.0:
        return 0.0
    return float(f[p] ** 2 * len(B) / den)


def random_trig_data(g: PennyGraph, x0: int, rng, modes: int = 8) -> np.ndarray:
    """Random low-frequency data ``sum_m (a_m cos m t + b_m sin m t) / (1 + m)``.

    ``t`` is the angle of each vertex around ``x0`` and the coefficients are
    standard normal draws from ``rng``; used as boundary data, it yields
    random harmonic probes with genuine large-scale variation.
    """
    d = g.coords - g.coords[x0]
    t = np.arctan2(d[:, 1], d[:, 0])
    a = rng.standard_normal(modes + 1)
    b = rng.standard_normal(modes + 1)
    m = np.arange(modes + 1)
    return ((a * np.cos(np.outer(t, m)) + b * np.sin(np.outer(t, m))) / (1 + m)).sum(axis=1)


def field_to_dict(values) -> dict:
    return {"values": np.asarray(values, dtype=float).tolist()}
