"""Dirichlet problems and the two mean value ratios."""

# %%
import numpy as np

from pennygraph import PLField, ball, build_contact_graph, generate_lattice, solve_dirichlet, trace_faces, triangulate_window
from pennygraph.extend import planar_mvi_ratio
from pennygraph.field import discrete_mvi_ratio, random_trig_data
from pennygraph.packing import make_rng

# %%
g = build_contact_graph(generate_lattice("square", 40))
x0 = int(np.argmin(np.linalg.norm(g.coords, axis=1)))
omega = ball(g, x0, 34)
mesh = triangulate_window(g, trace_faces(g))

# %% [markdown]
# Random low-frequency boundary data gives harmonic probes. The discrete
# ratio compares f(x0)^2 with the ball average of f^2; the planar ratio uses
# the piecewise-linear extension over a disk and equals 1/pi for constants.

# %%
rng = make_rng(0)
for i in range(5):
    f = solve_dirichlet(g, omega, random_trig_data(g, x0, rng)).values
    d = [discrete_mvi_ratio(g, f, x0, r) for r in (4, 8, 16)]
    p = planar_mvi_ratio(PLField(mesh, f, g), g.coords[x0], 16.0)
    print(f"probe {i}: discrete {np.round(d, 4)}  planar R=16 {p:.4f}")
print("planar constant:", planar_mvi_ratio(PLField(mesh, np.ones(g.n_vertices), g), g.coords[x0], 16.0),
      "vs 1/pi =", 1 / np.pi)
