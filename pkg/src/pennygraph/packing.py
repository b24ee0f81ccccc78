"""Configurations of non-overlapping disks of diameter one.

A packing is stored as an immutable ``(n, 2)`` array of centers. All lengths
are in units of the disk diameter, so two disks touch exactly when their
centers are at distance one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

RADIUS = 0.5
DEFAULT_TOLERANCE = 1e-9

__all__ = [
    "RADIUS",
    "DEFAULT_TOLERANCE",
    "DiskPacking",
    "ValidationReport",
    "RetryBudgetExhausted",
    "validate_packing",
    "generate_lattice",
    "generate_random_subset",
    "make_rng",
    "save_packing",
    "load_packing",
    "packing_to_dict",
    "packing_from_dict",
]


class RetryBudgetExhausted(RuntimeError):
    """Raised when random generation cannot meet its constraint in budget."""


@dataclass(frozen=True)
class DiskPacking:
    """Centers of unit-diameter disks.

    Parameters
    ----------
    centers : array_like, shape (n, 2)
        Disk centers.
    tolerance : float
        Absolute slack used by tangency and overlap tests.
    """

    centers: np.ndarray
    tolerance: float = DEFAULT_TOLERANCE
    radius: float = field(default=RADIUS, init=False)

    def __post_init__(self):
        c = np.array(self.centers, dtype=float).reshape(-1, 2)
        c.setflags(write=False)
        object.__setattr__(self, "centers", c)
        if not self.tolerance >= 0:
            raise ValueError("tolerance must be nonnegative")

    def __len__(self):
        return len(self.centers)

    def subset(self, keep) -> "DiskPacking":
        """Packing restricted to ``keep`` (boolean mask or index array)."""
        return DiskPacking(self.centers[keep], self.tolerance)

    def translated(self, offset) -> "DiskPacking":
        return DiskPacking(self.centers + np.asarray(offset, dtype=float), self.tolerance)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: list[tuple[int, int]]
    min_distance: float


def validate_packing(packing: DiskPacking) -> ValidationReport:
    """Check that the open disks are pairwise disjoint.

    Returns a report rather than raising. The minimum pairwise center
    distance is ``inf`` for packings with fewer than two disks.
    """
    c = packing.centers
    n = len(c)
    if n < 2:
        return ValidationReport(True, [], float("inf"))
    tree = cKDTree(c)
    lim = 1.0 - packing.tolerance
    pairs = tree.query_pairs(lim, output_type="ndarray")
    violations = []
    if len(pairs):
        d = np.linalg.norm(c[pairs[:, 0]] - c[pairs[:, 1]], axis=1)
        bad = pairs[d < lim]
        violations = sorted((int(min(i, j)), int(max(i, j))) for i, j in bad)
    dist, _ = tree.query(c, k=2)
    return ValidationReport(not violations, violations, float(dist[:, 1].min()))


def generate_lattice(kind: str, half_width: int, tolerance: float = DEFAULT_TOLERANCE) -> DiskPacking:
    """Square or triangular lattice patch of disks around the origin.

    ``square`` gives the points ``(i, j)`` with ``|i|, |j| <= L``.
    ``triangular`` gives ``i*(1, 0) + j*(1/2, sqrt(3)/2)`` for all lattice
    points within graph distance ``L`` of the origin (a hexagonal patch of
    ``3L^2 + 3L + 1`` disks).
    """
    L = int(half_width)
    if L < 0:
        raise ValueError("half_width must be >= 0")
    r = np.arange(-L, L + 1)
    i, j = np.meshgrid(r, r, indexing="ij")
    i, j = i.ravel(), j.ravel()
    if kind == "square":
        pts = np.column_stack([i, j]).astype(float)
    elif kind == "triangular":
        keep = np.maximum(np.maximum(np.abs(i), np.abs(j)), np.abs(i + j)) <= L
        i, j = i[keep], j[keep]
        pts = np.column_stack([i + 0.5 * j, (np.sqrt(3) / 2) * j])
    else:
        raise ValueError(f"unknown lattice kind {kind!r}")
    return DiskPacking(pts, tolerance)


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator (Philox) keyed by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=int(seed) & 0xFFFFFFFFFFFFFFFF))


def generate_random_subset(
    half_width: int,
    keep_probability: float,
    max_facial_degree: int,
    seed: int,
    retry_budget: int = 1000,
    tolerance: float = DEFAULT_TOLERANCE,
) -> DiskPacking:
    """Random connected site subset of a triangular lattice patch.

    Each site is kept independently with probability ``keep_probability``;
    the largest connected component of the kept sites is returned once all
    its bounded faces have facial degree at most ``max_facial_degree``.
    Draws are repeated up to ``retry_budget`` times.

    Raises
    ------
    RetryBudgetExhausted
        No draw satisfied the facial degree bound.
    """
    from .contact import build_contact_graph
    from .faces import trace_faces

    if not 0 < keep_probability <= 1:
        raise ValueError("keep_probability must lie in (0, 1]")
    if max_facial_degree < 3:
        raise ValueError("max_facial_degree must be >= 3")
    base = generate_lattice("triangular", half_width, tolerance)
    rng = make_rng(seed)
    worst = None
    for _ in range(int(retry_budget)):
        mask = rng.random(len(base)) < keep_probability
        if not mask.any():
            continue
        g = build_contact_graph(base.subset(mask))
        labels, counts = np.unique(g.component, return_counts=True)
        big = labels[np.argmax(counts)]
        sub = DiskPacking(g.coords[g.component == big], tolerance)
        D = trace_faces(build_contact_graph(sub)).D
        if D <= max_facial_degree:
            return sub
        worst = D if worst is None else min(worst, D)
    raise RetryBudgetExhausted(
        f"no draw met max facial degree {max_facial_degree} in {retry_budget} tries"
        f" (best D seen: {worst})"
    )


def packing_to_dict(packing: DiskPacking) -> dict:
    return {
        "radius": RADIUS,
        "tolerance": packing.tolerance,
        "centers": packing.centers.tolist(),
    }


def packing_from_dict(doc: dict) -> DiskPacking:
    if doc.get("radius", RADIUS) != RADIUS:
        raise ValueError("only disks of radius 1/2 are supported")
    return DiskPacking(np.asarray(doc["centers"], dtype=float).reshape(-1, 2),
                       float(doc.get("tolerance", DEFAULT_TOLERANCE)))


def save_packing(packing: DiskPacking, path) -> None:
    # float repr is the shortest string that round-trips, so reloading is bit-exact
    Path(path).write_text(json.dumps(packing_to_dict(packing)))


def load_packing(path) -> DiskPacking:
    return packing_from_dict(json.loads(Path(path).read_text()))
