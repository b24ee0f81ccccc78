"""Penny graphs: contact graphs of unit-diameter disk packings.

Build the graph from disk centers, trace its faces, triangulate them with
diagonals only, and study harmonic functions and heat flow on the result.
"""

from .contact import PennyGraph, ball, bfs_distances, build_contact_graph, sphere, vertex_boundary
from .dimension import build_pencil, estimate_dim, pencil_eigenvalues
from .extend import PLField, disk_mass_matrix, integrate_pl_square, planar_mvi_ratio, trace_constant
from .faces import FaceSet, trace_faces
from .field import discrete_mvi_ratio, laplacian, solve_dirichlet
from .heat import caloric_polynomial, evolve, heat_step
from .packing import DiskPacking, generate_lattice, generate_random_subset, load_packing, save_packing
from .triangulate import Triangulation, quality_report, triangulate_window

__version__ = "0.1.0"

__all__ = [
    "DiskPacking", "generate_lattice", "generate_random_subset", "load_packing", "save_packing",
    "PennyGraph", "build_contact_graph", "bfs_distances", "ball", "sphere", "vertex_boundary",
    "FaceSet", "trace_faces",
    "Triangulation", "triangulate_window", "quality_report",
    "laplacian", "solve_dirichlet", "discrete_mvi_ratio",
    "PLField", "disk_mass_matrix", "integrate_pl_square", "planar_mvi_ratio", "trace_constant",
    "build_pencil", "pencil_eigenvalues", "estimate_dim",
    "heat_step", "evolve", "caloric_polynomial",
]
