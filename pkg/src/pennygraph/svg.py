"""SVG drawings of packings, meshes and fields."""

from __future__ import annotations

import numpy as np

__all__ = ["render_svg"]

_HEADER = ("<!-- pennygraph figure: plane y is flipped (screen y = -plane y); "
           "units are disk diameters -->")


def _color(t: float) -> str:
    # blue -> white -> red
    t = min(1.0, max(0.0, t))
    if t < 0.5:
        s = t / 0.5
        r, g, b = s, s, 1.0
    else:
        s = (1.0 - t) / 0.5
        r, g, b = 1.0, s, s
    return "#%02x%02x%02x" % (round(255 * r), round(255 * g), round(255 * b))


def render_svg(coords, circles: bool = True, edges=None, triangles=None,
               tri_values=None, radius: float = 0.5) -> str:
    """Render disks, straight edges and (optionally colored) triangles.

    ``tri_values`` colors each triangle on a diverging scale between the
    minimum and maximum value; without it triangles are drawn unfilled.
    """
    c = np.asarray(coords, dtype=float).reshape(-1, 2)
    pad = radius + 0.5
    if len(c):
        lo, hi = c.min(axis=0) - pad, c.max(axis=0) + pad
    else:
        lo, hi = np.zeros(2) - pad, np.zeros(2) + pad
    w, h = hi - lo
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        _HEADER,
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{lo[0]:.6f} {-hi[1]:.6f} {w:.6f} {h:.6f}">',
    ]

    def pt(p):
        return f"{p[0]:.6f},{-p[1]:.6f}"

    if triangles is not None and len(triangles):
        tv = None if tri_values is None else np.asarray(tri_values, dtype=float)
        if tv is not None:
            span = tv.max() - tv.min()
            norm = (tv - tv.min()) / span if span > 0 else np.full(len(tv), 0.5)
        parts.append('<g stroke="#888888" stroke-width="0.02">')
        for i, t in enumerate(np.asarray(triangles)):
            fill = "none" if tv is None else _color(norm[i])
            parts.append(f'<polygon points="{" ".join(pt(c[j]) for j in t)}" fill="{fill}"/>')
        parts.append("</g>")
    if circles:
        parts.append('<g fill="none" stroke="#1f4e79" stroke-width="0.02">')
        for p in c:
            parts.append(f'<circle cx="{p[0]:.6f}" cy="{-p[1]:.6f}" r="{radius}"/>')
        parts.append("</g>")
    if edges is not None and len(edges):
        parts.append('<g stroke="#000000" stroke-width="0.04">')
        for i, j in np.asarray(edges):
            parts.append(f'<line x1="{c[i, 0]:.6f}" y1="{-c[i, 1]:.6f}" '
                         f'x2="{c[j, 0]:.6f}" y2="{-c[j, 1]:.6f}"/>')
        parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
