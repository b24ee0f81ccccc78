"""Metric-measure diagnostics for penny-graph windows.

Every check works on balls around sampled centers and refuses radii that
would let the doubled ball reach the window's outer face: radius ``R`` is
admissible at ``x0`` only if ``2R + 1 < d(x0, outer face)``.

The Poincare check uses neighboring pairs ``w ~ z`` inside ``B_{2R}`` on the
right-hand side, the usual graph form of the inequality.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .contact import PennyGraph, bfs_distances
from .faces import outer_boundary

__all__ = [
    "MetricReport",
    "TruncationError",
    "margins",
    "quasi_isometry_check",
    "doubling_report",
    "poincare_report",
    "quadratic_growth_check",
]


class TruncationError(ValueError):
    """A requested ball would touch the window's outer face."""


@dataclass
class MetricReport:
    entries: list = field(default_factory=list)

    def add(self, entry: dict) -> dict:
        self.entries.append(entry)
        return entry

    @property
    def passed(self) -> bool:
        return all(e["passed"] for e in self.entries)

    def to_dict(self) -> dict:
        return {"checks": self.entries, "passed": self.passed,
                "poincare_pairs": "adjacent"}


def margins(g: PennyGraph) -> np.ndarray:
    """Graph distance from every vertex to the outer face of its window."""
    return bfs_distances(g, outer_boundary(g))


def _guard(margin, x0, rho):
    if not rho + 1 < margin[x0]:
        raise TruncationError(
            f"ball of radius {rho} at {x0} reaches the window edge (margin {margin[x0]})")


def quasi_isometry_check(g: PennyGraph, D: int, pairs) -> dict:
    """Check ``d/(2D) <= |phi(x) phi(y)| <= d`` on sampled vertex pairs.

    Reports the tightest observed ratios ``lower = min |phi phi| * 2D / d``
    and ``upper = max |phi phi| / d``; both bounds hold iff
    ``lower >= 1`` and ``upper <= 1`` (to the graph tolerance).
    """
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    lower, upper, bad = np.inf, 0.0, []
    for x in np.unique(pairs[:, 0]):
        ys = pairs[pairs[:, 0] == x, 1]
        d = bfs_distances(g, [x])[ys]
        if np.any(d < 0):
            raise ValueError("pair spans two components")
        e = np.linalg.norm(g.coords[ys] - g.coords[x], axis=1)
        m = d > 0
        if m.any():
            lower = min(lower, float(np.min(e[m] * 2 * D / d[m])))
            upper = max(upper, float(np.max(e[m] / d[m])))
        slack = g.tolerance * np.maximum(d, 1)
        viol = (e * 2 * D < d - 2 * D * slack) | (e > d + slack)
        bad += [(int(x), int(y)) for y in ys[viol]]
    return {"name": "quasi_isometry", "D": int(D), "pairs": len(pairs),
            "lower_ratio": lower, "upper_ratio": upper,
            "violations": bad, "passed": not bad}


def doubling_report(g: PennyGraph, x0_samples, R_max: int) -> dict:
    """Empirical doubling constant ``max |B_2R| / |B_R|`` for ``1 <= R <= R_max``.

    Raises
    ------
    TruncationError
        ``4 R_max`` exceeds the margin of a center, or ``B_{2 R_max}`` would
        reach the window edge.
    """
    margin = margins(g)
    rows = []
    for x0 in np.atleast_1d(x0_samples):
        if 4 * R_max > margin[x0]:
            raise TruncationError(f"2*R_max must be at most half the margin at {x0}")
        _guard(margin, x0, 2 * R_max)
        d = bfs_distances(g, [x0], max_depth=2 * R_max)
        d = d[d >= 0]
        sizes = np.bincount(d, minlength=2 * R_max + 1).cumsum()
        for R in range(1, R_max + 1):
            rows.append((int(x0), R, int(sizes[R]), int(sizes[2 * R])))
    ratios = np.array([b2 / b for _, _, b, b2 in rows])
    return {"name": "doubling", "R_max": int(R_max), "C_doubling": float(ratios.max()),
            "samples": rows, "passed": bool(np.isfinite(ratios).all())}


def poincare_report(g: PennyGraph, x0_samples, R_list, probe_fields) -> dict:
    """Empirical Poincare constant over centers, radii and probe fields.

    For each sample the ratio is
    ``sum_{B_R} |f - f_R|^2 / (R^2 * sum_{w~z in B_2R} |f(w) - f(z)|^2)``;
    probes with no variation on ``B_2R`` are skipped.
    """
    margin = margins(g)
    tail, head = g.tail, g.indices
    rows = []
    skipped = 0
    for x0 in np.atleast_1d(x0_samples):
        Rmax = max(R_list)
        _guard(margin, x0, 2 * Rmax)
        d = bfs_distances(g, [x0], max_depth=2 * Rmax)
        for R in R_list:
            inB = (d >= 0) & (d <= R)
            in2 = (d >= 0) & (d <= 2 * R)
            e = in2[tail] & in2[head] & (tail < head)
            for name, f in probe_fields.items():
                f = np.asarray(f, dtype=float)
                grad = float(np.sum((f[tail[e]] - f[head[e]]) ** 2))
                if grad == 0.0:
                    skipped += 1
                    continue
                fb = f[inB]
                var = float(np.sum((fb - fb.mean()) ** 2))
                rows.append((int(x0), int(R), name, var / (R**2 * grad)))
    C2 = max((r[3] for r in rows), default=float("nan"))
    return {"name": "poincare", "pairs": "adjacent", "C_poincare": C2,
            "samples": rows, "skipped": skipped, "passed": bool(np.isfinite(C2))}


def quadratic_growth_check(g: PennyGraph, x0_samples, R_list) -> dict:
    """Empirical ``min |B_R| / R^2`` over centers and radii ``R >= 1``."""
    if min(R_list) < 1:
        raise ValueError("radii must be >= 1")
    margin = margins(g)
    rows = []
    for x0 in np.atleast_1d(x0_samples):
        for R in R_list:
            _guard(margin, x0, 2 * R)
        d = bfs_distances(g, [x0], max_depth=max(R_list))
        d = d[d >= 0]
        sizes = np.bincount(d, minlength=max(R_list) + 1).cumsum()
        rows += [(int(x0), int(R), int(sizes[R])) for R in R_list]
    C = min(b / R**2 for _, R, b in rows)
    return {"name": "quadratic_growth", "C_growth": float(C), "samples": rows,
            "passed": bool(C > 0)}
