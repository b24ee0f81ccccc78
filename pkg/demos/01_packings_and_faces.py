"""Build penny graphs and look at their faces."""

# %%
import numpy as np

from pennygraph import build_contact_graph, generate_lattice, generate_random_subset, trace_faces
from pennygraph.faces import euler_characteristics

# %% [markdown]
# A square-lattice window and a random subset of the triangular lattice.
# Every disk has unit diameter, so contacts are center pairs at distance 1.

# %%
windows = {
    "square L=10": generate_lattice("square", 10),
    "triangular L=10": generate_lattice("triangular", 10),
    "random L=10, p=0.9": generate_random_subset(10, 0.9, 8, seed=1),
}
for name, pk in windows.items():
    g = build_contact_graph(pk)
    faces = trace_faces(g)
    degs = [f.degree for f in faces.faces if not f.outer]
    hist = dict(zip(*np.unique(degs, return_counts=True)))
    print(f"{name}: V={g.n_vertices} E={g.n_edges} D={faces.D}")
    print("   face degrees:", {int(k): int(v) for k, v in hist.items()})
    print("   euler:", euler_characteristics(g, faces))
