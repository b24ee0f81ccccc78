"""Heat flow on penny graphs and caloric polynomials.

A caloric polynomial built from a seed ``q`` is
``u(x, t) = sum_{i <= m} t^i / i! * (Lap^i q)(x)``; it solves the heat
equation wherever ``Lap^(m+1) q`` vanishes, for all ``t``, and in particular
is an ancient solution there.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .contact import PennyGraph, bfs_distances
from .faces import outer_boundary
from .field import laplacian

__all__ = [
    "MAX_DT",
    "heat_step",
    "evolve",
    "AncientSolution",
    "caloric_polynomial",
    "growth_certificate",
    "independent_count",
    "caloric_bound",
]

# deg <= 6 bounds the spectral radius of -Lap by 12; dt <= 1/12 keeps
# 1 - dt*deg(x) >= 1/2, so each step is a convex combination
MAX_DT = 1.0 / 12.0
VANISH_TOL = 1e-10


def heat_step(g: PennyGraph, u, dt: float) -> np.ndarray:
    """One explicit Euler step ``u + dt * Lap u``."""
    if not 0 < dt <= MAX_DT:
        raise ValueError(f"dt must lie in (0, 1/12], got {dt}")
    u = np.asarray(u, dtype=float)
    return u + dt * laplacian(g, u)


def evolve(g: PennyGraph, u, dt: float, steps: int, every: int = 0):
    """Run ``steps`` Euler steps; return the final state and optional frames."""
    frames = [np.array(u, dtype=float)] if every else []
    for s in range(1, steps + 1):
        u = heat_step(g, u, dt)
        if every and s % every == 0:
            frames.append(u)
    return u, frames


@dataclass(frozen=True)
class AncientSolution:
    """Caloric polynomial with coefficient fields ``coeffs[i] = Lap^i q``.

    ``valid`` marks the vertices where ``Lap^(m+1) q`` vanishes and every
    Laplacian used sees a complete (untruncated) neighborhood.
    """

    graph: PennyGraph
    coeffs: tuple
    valid: np.ndarray

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, t: float) -> np.ndarray:
        return sum(t**i / factorial(i) * q for i, q in enumerate(self.coeffs))

    def time_derivative(self, t: float) -> np.ndarray:
        out = np.zeros_like(self.coeffs[0])
        for i in range(1, len(self.coeffs)):
            out = out + t ** (i - 1) / factorial(i - 1) * self.coeffs[i]
        return out

    def shift_identity_holds(self) -> bool:
        """Stored fields satisfy ``coeffs[i+1] == Lap coeffs[i]`` exactly on ``valid``."""
        v = self.valid
        return all(np.array_equal(laplacian(self.graph, self.coeffs[i])[v], self.coeffs[i + 1][v])
                   for i in range(self.order))


def caloric_polynomial(g: PennyGraph, q, m: int) -> AncientSolution:
    """Caloric polynomial of order ``m`` seeded by ``q``.

    Raises
    ------
    ValueError
        ``m < 0`` or no vertex qualifies for the validity region.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    q = np.asarray(q, dtype=float)
    coeffs = [q]
    for _ in range(m):
        coeffs.append(laplacian(g, coeffs[-1]))
    top = laplacian(g, coeffs[-1])
    edge = outer_boundary(g)
    dist = bfs_distances(g, edge) if len(edge) else np.full(g.n_vertices, np.iinfo(np.int64).max)
    valid = (np.abs(top) <= VANISH_TOL) & (dist >= m + 2)
    if not valid.any():
        raise ValueError("empty validity region")
    for c in coeffs:
        c.setflags(write=False)
    valid.setflags(write=False)
    return AncientSolution(g, tuple(coeffs), valid)


def growth_certificate(sol: AncientSolution, x0: int, k: int, vertices, times,
                       saturation_tol: float = 0.05) -> dict:
    """Smallest ``C`` with ``|u(x, t)| <= C (1 + d(x, x0) + sqrt|t|)^k`` on a sample grid.

    The grid is the product of ``vertices`` (restricted to the validity
    region) and ``times`` (all ``<= 0``). ``C`` is also recomputed on the
    half-scale subgrid (distance and ``sqrt|t|`` at most half their maxima);
    the certificate is flagged saturated when the two agree to
    ``saturation_tol`` relative.
    """
    times = np.asarray(times, dtype=float)
    if np.any(times > 0):
        raise ValueError("ancient solutions are sampled at t <= 0")
    vertices = np.asarray(vertices, dtype=np.int64)
    vertices = vertices[sol.valid[vertices]]
    d = bfs_distances(sol.graph, [x0])[vertices].astype(float)
    s = np.sqrt(np.abs(times))
    U = np.array([sol(t)[vertices] for t in times])  # (nt, nv)
    W = (1.0 + d[None, :] + s[:, None]) ** k
    ratio = np.abs(U) / W
    C = float(ratio.max())
    half = (s[:, None] <= s.max() / 2) & (d[None, :] <= d.max() / 2)
    C_half = float(ratio[half].max()) if half.any() else float("nan")
    change = abs(C - C_half) / C if C > 0 else 0.0
    return {"k": k, "C": C, "C_half": C_half, "relative_change": change,
            "saturated": bool(change <= saturation_tol), "samples": int(ratio.size)}


def independent_count(solutions, region) -> int:
    """Number of linearly independent caloric polynomials, judged on ``region``.

    Two caloric polynomials agree as functions of ``(x, t)`` iff their
    coefficient fields agree, so independence is the rank of the stacked
    (factorial-scaled) coefficients.
    """
    region = np.asarray(region)
    width = max(s.order for s in solutions) + 1
    rows = []
    for s in solutions:
        parts = [s.coeffs[i][region] / factorial(i) if i <= s.order else np.zeros(len(region))
                 for i in range(width)]
        rows.append(np.concatenate(parts))
    A = np.array(rows)
    A = A / np.maximum(np.linalg.norm(A, axis=1, keepdims=True), 1e-300)
    return int(np.linalg.matrix_rank(A, tol=1e-9 * max(A.shape)))


def caloric_bound(k: int, dim_estimate: int) -> int:
    """Upper bound ``(floor(k/2) + 1) * dim`` on independent rate-``k`` ancient solutions."""
    return (k // 2 + 1) * int(dim_estimate)
