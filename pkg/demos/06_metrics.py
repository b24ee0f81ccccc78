"""Doubling, growth, Poincare and quasi-isometry checks on a random window."""

# %%
import numpy as np

from pennygraph import build_contact_graph, generate_random_subset, trace_faces
from pennygraph.geometry import (
    doubling_report,
    margins,
    poincare_report,
    quadratic_growth_check,
    quasi_isometry_check,
)
from pennygraph.packing import make_rng

# %%
g = build_contact_graph(generate_random_subset(14, 0.9, 8, seed=0))
D = trace_faces(g).D
m = margins(g)
x0 = int(np.argmax(m))
print(f"{g.n_vertices} vertices, D={D}, deepest vertex {x0} at margin {m[x0]}")

# %%
rng = make_rng(1)
pairs = rng.integers(g.n_vertices, size=(500, 2))
print("quasi-isometry:", {k: v for k, v in quasi_isometry_check(g, D, pairs).items() if k != "violations"})
print("doubling:", doubling_report(g, [x0], 2)["C_doubling"])
print("growth:", quadratic_growth_check(g, [x0], [1, 2, 3])["C_growth"])
c = g.coords - g.coords[x0]
print("poincare:", poincare_report(g, [x0], [2, 3], {"x": c[:, 0], "y": c[:, 1]})["C_poincare"])
