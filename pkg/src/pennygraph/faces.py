"""Face walks of the straight-line embedding of a penny graph.

Faces are recovered from the rotation system: arriving at ``v`` along the
directed edge ``(u, v)``, the walk leaves along the edge that comes next
clockwise after ``(v, u)`` around ``v``. Bounded faces are then traversed
counterclockwise (interior on the left) and each component's outer face
clockwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .contact import PennyGraph, bfs_distances

__all__ = [
    "GeometryError",
    "FaceWalk",
    "FaceSet",
    "trace_faces",
    "face_polygon",
    "walk_area",
    "euler_characteristics",
    "outer_boundary",
    "window_margin",
    "faces_to_dict",
]

TWO_PI = 2 * np.pi


class GeometryError(RuntimeError):
    """The embedding contradicts an invariant that valid penny graphs satisfy."""


@dataclass(frozen=True)
class FaceWalk:
    """A closed walk of directed edges bounding one face.

    ``vertices[i]`` is the tail of ``edges[i]``; ``angles[i]`` is the interior
    angle at the corner ``vertices[i]`` (in ``(0, 2*pi]``, a pendant vertex
    contributes ``2*pi``).
    """

    vertices: tuple
    edges: tuple
    angles: np.ndarray
    turning: int
    outer: bool

    @property
    def degree(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class FaceSet:
    faces: list
    edge_face: np.ndarray
    D: int

    @property
    def bounded(self) -> list:
        return [f for f in self.faces if not f.outer]

    def bounded_ids(self) -> list:
        return [i for i, f in enumerate(self.faces) if not f.outer]


def _edge_angles(g: PennyGraph) -> np.ndarray:
    vec = g.coords[g.indices] - g.coords[g.tail]
    return np.mod(np.arctan2(vec[:, 1], vec[:, 0]), TWO_PI)


def trace_faces(g: PennyGraph) -> FaceSet:
    """Partition the directed edges of ``g`` into face walks.

    The outer face of each component is the walk with turning number -1;
    ``D`` is the largest degree among the remaining (bounded) walks and 0 if
    there are none.

    Raises
    ------
    GeometryError
        A walk has turning number other than +1 or -1.
    """
    m = len(g.indices)
    deg = g.degree
    rev = g.reverse_edge()
    head = g.indices
    local = rev - g.indptr[head]
    nxt = g.indptr[head] + np.mod(local - 1, deg[head])
    ang = _edge_angles(g)
    # corner angle at head(e) between the reversed incoming edge and the outgoing one
    corner = np.mod(ang[rev] - ang[nxt], TWO_PI)
    corner[corner <= 0] = TWO_PI

    edge_face = np.full(m, -1, dtype=np.int64)
    nxt_l = nxt.tolist()
    tail = g.tail
    faces = []
    for start in range(m):
        if edge_face[start] >= 0:
            continue
        walk = []
        e = start
        while edge_face[e] < 0:
            edge_face[e] = len(faces)
            walk.append(e)
            e = nxt_l[e]
        if e != start:
            raise GeometryError(f"face walk from edge {start} is not closed")
        walk = np.asarray(walk)
        # corner at tail(walk[i]) sits between walk[i-1] and walk[i]
        angles = corner[np.roll(walk, 1)]
        turn = float(np.sum(np.pi - angles) / TWO_PI)
        t = int(round(turn))
        if t not in (-1, 1) or abs(turn - t) > 1e-6:
            raise GeometryError(
                f"turning number {turn:.6f} for walk {tail[walk].tolist()}"
            )
        angles.setflags(write=False)
        faces.append(FaceWalk(tuple(tail[walk].tolist()), tuple(walk.tolist()),
                              angles, t, t == -1))
    D = max((f.degree for f in faces if not f.outer), default=0)
    edge_face.setflags(write=False)
    return FaceSet(faces, edge_face, D)


def walk_area(points) -> float:
    """Signed shoelace area of a closed walk (repeated points allowed)."""
    p = np.asarray(points, dtype=float)
    q = np.roll(p, -1, axis=0)
    return 0.5 * float(np.sum(p[:, 0] * q[:, 1] - q[:, 0] * p[:, 1]))


def face_polygon(g: PennyGraph, face: FaceWalk) -> np.ndarray:
    """Corner coordinates of a bounded face in walk order."""
    if face.outer:
        raise ValueError("the outer face has no bounded polygon")
    return g.coords[list(face.vertices)]


def euler_characteristics(g: PennyGraph, faces: FaceSet) -> dict:
    """``V - E + F`` per component, counting each component's own walks.

    An isolated vertex has no walk; its single (outer) face is counted
    implicitly.
    """
    comp = g.component
    V = np.bincount(comp, minlength=g.n_components)
    E = np.bincount(comp[g.tail], minlength=g.n_components) // 2
    F = np.zeros(g.n_components, dtype=np.int64)
    for f in faces.faces:
        F[comp[f.vertices[0]]] += 1
    F[(V == 1) & (E == 0)] = 1
    return {int(c): int(V[c] - E[c] + F[c]) for c in range(g.n_components)}


def faces_to_dict(g: PennyGraph, faces: FaceSet) -> dict:
    out = []
    for f in faces.faces:
        area = walk_area(g.coords[list(f.vertices)])
        out.append({"degree": f.degree, "area": area, "outer": f.outer,
                    "walk": list(f.vertices)})
    return {"faces": out, "D": faces.D}


def outer_boundary(g: PennyGraph) -> np.ndarray:
    """Sorted ids of the vertices on the outer face of every component.

    Traces only the outer walks, starting from each component's leftmost
    vertex, where the westward direction lies in the outer face.
    """
    out = []
    deg = g.degree
    rev = g.reverse_edge()
    head = g.indices
    nxt = g.indptr[head] + np.mod(rev - g.indptr[head] - 1, deg[head])
    ang = _edge_angles(g)
    order = np.lexsort((g.coords[:, 1], g.coords[:, 0]))
    seen = np.zeros(g.n_components, dtype=bool)
    for v in order:
        c = g.component[v]
        if seen[c]:
            continue
        seen[c] = True
        if deg[v] == 0:
            out.append(v)
            continue
        lo, hi = g.indptr[v], g.indptr[v + 1]
        below = np.flatnonzero(ang[lo:hi] < np.pi)
        # the outer walk leaves v along the last edge clockwise of due west
        e = lo + (below[-1] if len(below) else hi - lo - 1)
        start = e
        while True:
            out.append(g.indices[e])
            e = nxt[e]
            if e == start:
                break
    return np.unique(np.asarray(out, dtype=np.int64))


def window_margin(g: PennyGraph, x0: int) -> int:
    """Graph distance from ``x0`` to the outer face of its window."""
    ob = outer_boundary(g)
    ob = ob[g.component[ob] == g.component[x0]]
    d = bfs_distances(g, [x0])
    return int(d[ob].min())
