"""Diagonal triangulation of every face and its angle certificate."""

# %%
from pennygraph import build_contact_graph, generate_random_subset, quality_report, trace_faces, triangulate_window
from pennygraph.triangulate import face_area_residuals

# %%
g = build_contact_graph(generate_random_subset(12, 0.9, 8, seed=4))
faces = trace_faces(g)
mesh = triangulate_window(g, faces)
q = quality_report(mesh, faces.D)
print(f"{len(mesh)} triangles, edges in [{q['edge_min']:.3f}, {q['edge_max']:.3f}], D={q['D']}")
print(f"smallest angle {q['min_angle']:.4f} rad; area residual {face_area_residuals(g, faces, mesh).max():.1e}")

# %% [markdown]
# Smallest angle per facial degree: larger faces admit thinner triangles.

# %%
for d, row in sorted(q["by_degree"].items()):
    print(f"  degree {d}: {row['faces']} faces, min angle {row['min_angle']:.4f}, max edge {row['max_edge']:.3f}")
