"""Command-line entry point: ``pennygraph <command> [options]``.

Every command prints one JSON report (or writes it to ``--out``). Exit
codes: 0 success, 1 invalid input, 2 numerical failure, 3 I/O failure; on
failure a JSON object ``{"error": ..., "kind": ..., "exit": ...}`` goes to
stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .contact import InvalidPackingError, ball, build_contact_graph, graph_to_dict, nearest_vertex
from .dimension import RANK_TOL, build_pencil, estimate_dim
from .extend import PLField, planar_mvi_ratio
from .faces import GeometryError, euler_characteristics, faces_to_dict, trace_faces, window_margin
from .field import ConvergenceError, discrete_mvi_ratio, random_trig_data, solve_dirichlet
from .geometry import doubling_report, margins, poincare_report, quadratic_growth_check, quasi_isometry_check, MetricReport
from .heat import MAX_DT, caloric_polynomial, evolve, growth_certificate
from .packing import (RetryBudgetExhausted, generate_lattice, generate_random_subset, load_packing,
                      make_rng, packing_to_dict)
from .svg import render_svg
from .triangulate import face_area_residuals, mesh_to_dict, quality_report, triangulate_window

__all__ = ["RunConfig", "ConfigError", "parse_config", "run", "main"]

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3


class ConfigError(ValueError):
    """Rejected command-line configuration."""


@dataclass
class RunConfig:
    command: str
    input: Path | None = None
    out: Path | None = None
    threads: int = 1
    params: dict = field(default_factory=dict)


# --- argument types -------------------------------------------------------

def _int_at_least(lo):
    def conv(s):
        try:
            v = int(s)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {s!r}") from None
        if v < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}: {v}")
        return v
    return conv


def _positive_float(s):
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}") from None
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"must be a positive finite number: {s}")
    return v


def _nonneg_float(s):
    v = float(s)
    if not (math.isfinite(v) and v >= 0):
        raise argparse.ArgumentTypeError(f"must be a finite number >= 0: {s}")
    return v


def _probability(s):
    v = float(s)
    if not 0 < v <= 1:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1]: {s}")
    return v


def _float_list(s):
    try:
        vals = [float(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {s!r}") from None
    if not vals or any(not (math.isfinite(v) and v > 0) for v in vals):
        raise argparse.ArgumentTypeError(f"need positive numbers: {s!r}")
    return [int(v) if v.is_integer() else v for v in vals]


def _int_list(s):
    vals = _float_list(s)
    if any(not float(v).is_integer() for v in vals):
        raise argparse.ArgumentTypeError(f"need integers: {s!r}")
    return [int(v) for v in vals]


def _point(s):
    try:
        x, y = (float(t) for t in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"need X,Y: {s!r}") from None
    return [x, y]


def _threads_default():
    raw = os.environ.get("PENNY_THREADS")
    if raw is None:
        return 1
    try:
        return _int_at_least(1)(raw)
    except argparse.ArgumentTypeError as e:
        raise ConfigError(f"PENNY_THREADS: {e}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


FIELDS = ("const", "x", "y", "xy", "x2-y2", "x2+y2", "random")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pennygraph", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, needs_input=True):
        if needs_input:
            sp.add_argument("--input", "-i", type=Path, required=True, help="packing JSON file")
        sp.add_argument("--out", "-o", type=Path, help="write the report here instead of stdout")
        sp.add_argument("--threads", type=_int_at_least(1), default=None,
                        help="worker threads (default: $PENNY_THREADS or 1)")
        return sp

    def centered(sp):
        sp.add_argument("--center", type=_point, default=None,
                        help="X,Y of the base point (default: centroid of the disks)")

    sp = common(sub.add_parser("generate", help="write a disk packing"), needs_input=False)
    sp.add_argument("--kind", choices=("square", "triangular", "random"), required=True)
    sp.add_argument("--L", type=_int_at_least(0), required=True, help="lattice half-width")
    sp.add_argument("--p", type=_probability, default=0.9, help="keep probability (random)")
    sp.add_argument("--dmax", type=_int_at_least(3), default=8, help="max facial degree (random)")
    sp.add_argument("--seed", type=_int_at_least(0), default=0)
    sp.add_argument("--retries", type=_int_at_least(1), default=1000)

    common(sub.add_parser("graph", help="contact graph and degree statistics"))
    common(sub.add_parser("faces", help="face walks and maximal facial degree D"))

    sp = common(sub.add_parser("triangulate", help="associated triangulation and quality report"))
    sp.add_argument("--policy", choices=("greedy", "first"), default="greedy")

    sp = common(sub.add_parser("dirichlet", help="harmonic extension of boundary data from a ball"))
    centered(sp)
    sp.add_argument("--R", type=_int_at_least(1), required=True, help="graph radius of the domain")
    sp.add_argument("--data", choices=FIELDS, default="x2-y2")
    sp.add_argument("--seed", type=_int_at_least(0), default=0)
    sp.add_argument("--tol", type=_positive_float, default=1e-10)

    sp = common(sub.add_parser("mvi", help="discrete and planar mean value ratio tables"))
    centered(sp)
    sp.add_argument("--probes", type=_int_at_least(1), default=100)
    sp.add_argument("--seed", type=_int_at_least(0), default=0)
    sp.add_argument("--r", type=_int_list, default=[4, 8, 16], help="discrete radii")
    sp.add_argument("--R", type=_float_list, default=[16, 32], help="planar radii")
    sp.add_argument("--no-planar", action="store_true")
    sp.add_argument("--policy", choices=("greedy", "first"), default="greedy")

    sp = common(sub.add_parser("dim", help="numerical dimension of the rate-k harmonic space"))
    centered(sp)
    sp.add_argument("--k", type=_int_at_least(0), required=True)
    sp.add_argument("--beta", type=_positive_float, default=2.0)
    sp.add_argument("--delta", type=_positive_float, default=0.5)
    sp.add_argument("--R", type=_float_list, default=[12, 16, 24])
    sp.add_argument("--M", type=_int_at_least(0), default=None, help="highest boundary frequency")
    sp.add_argument("--mode", choices=("discrete", "planar"), default="discrete")
    sp.add_argument("--rank-tol", type=_positive_float, default=RANK_TOL)
    sp.add_argument("--exact-probes", action="store_true",
                    help="add the boundary data x, y, xy, x^2-y^2 to the candidates")

    sp = common(sub.add_parser("heat", help="heat flow frames or an ancient-solution certificate"))
    centered(sp)
    sp.add_argument("--mode", choices=("evolve", "ancient"), default="evolve")
    sp.add_argument("--dt", type=_positive_float, default=MAX_DT)
    sp.add_argument("--steps", type=_int_at_least(0), default=100)
    sp.add_argument("--every", type=_int_at_least(0), default=10)
    sp.add_argument("--init", choices=("delta", "random"), default="delta")
    sp.add_argument("--seed", type=_int_at_least(0), default=0)
    sp.add_argument("--q", choices=FIELDS[:-1], default="x2+y2", help="caloric seed field")
    sp.add_argument("--m", type=_int_at_least(0), default=1)
    sp.add_argument("--k", type=_int_at_least(0), default=2)
    sp.add_argument("--tmin", type=_nonneg_float, default=1e4, help="sample times down to -tmin")
    sp.add_argument("--nt", type=_int_at_least(2), default=41)

    sp = common(sub.add_parser("metrics", help="quasi-isometry, doubling, Poincare and growth checks"))
    sp.add_argument("--pairs", type=_int_at_least(1), default=1000)
    sp.add_argument("--centers", type=_int_at_least(1), default=5)
    sp.add_argument("--R-max", type=_int_at_least(1), default=None)
    sp.add_argument("--seed", type=_int_at_least(0), default=0)

    sp = common(sub.add_parser("figure", help="SVG of the packing, mesh or a field"))
    view = sp.add_mutually_exclusive_group()
    view.add_argument("--disks", action="store_true", help="disks and contacts (default)")
    view.add_argument("--mesh", action="store_true", help="disks, contacts and triangles")
    view.add_argument("--field", type=Path, help="JSON with per-vertex 'values' to color")
    sp.add_argument("--svg", type=Path, help="SVG destination (default: embedded in the report)")
    sp.add_argument("--policy", choices=("greedy", "first"), default="greedy")
    return p


def parse_config(argv) -> RunConfig:
    """Parse and validate arguments; nothing is computed here."""
    ns = vars(build_parser().parse_args(argv))
    cmd = ns.pop("command")
    inp, out, threads = ns.pop("input", None), ns.pop("out", None), ns.pop("threads")
    if threads is None:
        threads = _threads_default()
    if cmd == "heat" and ns["dt"] > MAX_DT:
        raise ConfigError(f"--dt must be at most 1/12, got {ns['dt']}")
    if cmd == "dim" and ns["beta"] <= 1:
        raise ConfigError("--beta must exceed 1")
    if cmd == "dim" and ns["M"] is not None and ns["M"] < 2 * ns["k"] + 1:
        raise ConfigError("--M must be at least 2k+1")
    if inp is not None and not inp.is_file():
        raise FileNotFoundError(f"input file not found: {inp}")
    return RunConfig(cmd, inp, out, threads, ns)


# --- helpers ---------------------------------------------------------------

def _clean(obj):
    # JSON-safe copy; non-finite floats become null
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, Path):
        return str(obj)
    return obj


def dumps(report: dict) -> str:
    """Canonical JSON: sorted keys, shortest round-trip floats, trailing newline."""
    return json.dumps(_clean(report), sort_keys=True, allow_nan=False, separators=(",", ":")) + "\n"


def _field(name, xy, rng=None):
    x, y = xy[:, 0], xy[:, 1]
    table = {
        "const": lambda: np.ones(len(xy)),
        "x": lambda: x.copy(),
        "y": lambda: y.copy(),
        "xy": lambda: x * y,
        "x2-y2": lambda: x**2 - y**2,
        "x2+y2": lambda: x**2 + y**2,
        "random": lambda: rng.standard_normal(len(xy)),
    }
    return table[name]()


def _load_graph(cfg):
    return build_contact_graph(load_packing(cfg.input))


def _base_vertex(g, center):
    if center is None:
        center = g.coords.mean(axis=0)
    return nearest_vertex(g, center)


# --- commands --------------------------------------------------------------

def _cmd_generate(cfg):
    p = cfg.params
    if p["kind"] == "random":
        pk = generate_random_subset(p["L"], p["p"], p["dmax"], p["seed"], p["retries"])
    else:
        pk = generate_lattice(p["kind"], p["L"])
    return {**packing_to_dict(pk), "n_disks": len(pk.centers)}


def _cmd_graph(cfg):
    g = _load_graph(cfg)
    deg = g.degree
    return {
        "graph": graph_to_dict(g),
        "n_vertices": g.n_vertices,
        "n_edges": g.n_edges,
        "n_components": g.n_components,
        "degree": {"min": int(deg.min()) if len(deg) else 0,
                   "max": int(deg.max()) if len(deg) else 0,
                   "mean": float(deg.mean()) if len(deg) else 0.0,
                   "histogram": np.bincount(deg, minlength=7).tolist()},
    }


def _cmd_faces(cfg):
    g = _load_graph(cfg)
    fs = trace_faces(g)
    rep = faces_to_dict(g, fs)
    rep["n_faces"] = len(fs.faces)
    rep["euler"] = euler_characteristics(g, fs)
    return rep


def _cmd_triangulate(cfg):
    g = _load_graph(cfg)
    fs = trace_faces(g)
    t = triangulate_window(g, fs, cfg.params["policy"])
    res = face_area_residuals(g, fs, t)
    return {"mesh": mesh_to_dict(t), "quality": quality_report(t, fs.D),
            "area_residual_max": float(res.max()) if len(res) else 0.0}


def _cmd_dirichlet(cfg):
    p = cfg.params
    g = _load_graph(cfg)
    x0 = _base_vertex(g, p["center"])
    if window_margin(g, x0) < p["R"] + 1:
        raise ValueError(f"B_{p['R']} around vertex {x0} reaches the window edge")
    omega = ball(g, x0, p["R"])
    data = _field(p["data"], g.coords - g.coords[x0], make_rng(p["seed"]))
    r = solve_dirichlet(g, omega, data, tol=p["tol"])
    return {"x0": x0, "R": p["R"], "data": p["data"], "values": r.values,
            "omega_size": len(r.omega), "boundary_size": len(r.boundary),
            "residual": r.residual, "iterations": r.iterations}


def _cmd_mvi(cfg):
    p = cfg.params
    g = _load_graph(cfg)
    x0 = _base_vertex(g, p["center"])
    planar = not p["no_planar"]
    R_solve = max(p["r"])
    if planar:
        R_solve = max(R_solve, int(math.ceil(2 * max(p["R"]))))
    if window_margin(g, x0) < R_solve + 1:
        raise ValueError(f"solve radius {R_solve} reaches the window edge")
    omega = ball(g, x0, R_solve)
    rng = make_rng(p["seed"])
    data = [random_trig_data(g, x0, rng) for _ in range(p["probes"])]

    def solve(d):
        return solve_dirichlet(g, omega, d).values

    if cfg.threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(cfg.threads) as ex:
            fields = list(ex.map(solve, data))
    else:
        fields = [solve(d) for d in data]

    def table(ratio_fn, radii, const):
        rows = []
        for r in radii:
            vals = np.array([ratio_fn(f, r) for f in fields])
            run = np.maximum.accumulate(vals)
            rows.append({"radius": r, "constant_ratio": ratio_fn(const, r),
                         "ratios": vals, "running_sup": run, "sup": float(run[-1])})
        return rows

    one = np.ones(g.n_vertices)
    out = {"x0": x0, "probes": p["probes"], "R_solve": R_solve}
    out["discrete"] = table(lambda f, r: discrete_mvi_ratio(g, f, x0, r), p["r"], one)
    out["C1_discrete"] = max(row["sup"] for row in out["discrete"])
    if planar:
        mesh = triangulate_window(g, trace_faces(g), p["policy"])
        pt = g.coords[x0]
        out["planar"] = table(lambda f, R: planar_mvi_ratio(PLField(mesh, f, g), pt, R),
                              p["R"], one)
        out["C1_planar"] = max(row["sup"] for row in out["planar"])
    return out


_EXACT = {
    "x": lambda c: c[:, 0],
    "y": lambda c: c[:, 1],
    "xy": lambda c: c[:, 0] * c[:, 1],
    "x2-y2": lambda c: c[:, 0] ** 2 - c[:, 1] ** 2,
}


def _cmd_dim(cfg):
    p = cfg.params
    g = _load_graph(cfg)
    x0 = _base_vertex(g, p["center"])
    extra = None
    if p["exact_probes"]:
        o = g.coords[x0]
        extra = {k: (lambda c, h=h: h(c - o)) for k, h in _EXACT.items()}
    mesh = None
    if p["mode"] == "planar":
        mesh = triangulate_window(g, trace_faces(g))
    pencils = [build_pencil(g, x0, p["k"], R, p["beta"], p["M"], p["mode"], extra, mesh, cfg.threads)
               for R in p["R"]]
    rep = estimate_dim(pencils, p["k"], p["delta"], p["rank_tol"]).to_dict()
    rep["x0"] = x0
    rep["labels"] = pencils[0].labels
    return rep


def _cmd_heat(cfg):
    p = cfg.params
    g = _load_graph(cfg)
    x0 = _base_vertex(g, p["center"])
    if p["mode"] == "evolve":
        if p["init"] == "delta":
            u0 = np.zeros(g.n_vertices)
            u0[x0] = 1.0
        else:
            u0 = make_rng(p["seed"]).random(g.n_vertices)
        every = p["every"] or max(p["steps"], 1)
        u, frames = evolve(g, u0, p["dt"], p["steps"], every)
        steps = [i * every for i in range(len(frames))]
        return {"mode": "evolve", "dt": p["dt"], "steps": p["steps"], "x0": x0,
                "frames": [{"step": s, "mass": float(f.sum()), "min": float(f.min()),
                            "max": float(f.max())} for s, f in zip(steps, frames)],
                "final": u}
    q = _field(p["q"], g.coords - g.coords[x0])
    sol = caloric_polynomial(g, q, p["m"])
    times = -np.linspace(0.0, p["tmin"], p["nt"])
    verts = np.flatnonzero(sol.valid)
    cert = growth_certificate(sol, x0, p["k"], verts, times)
    return {"mode": "ancient", "q": p["q"], "m": p["m"], "x0": x0,
            "valid_vertices": int(sol.valid.sum()),
            "shift_identity": sol.shift_identity_holds(),
            "coefficients_at_x0": [float(c[x0]) for c in sol.coeffs],
            "certificate": cert}


def _cmd_metrics(cfg):
    p = cfg.params
    g = _load_graph(cfg)
    rng = make_rng(p["seed"])
    fs = trace_faces(g)
    rep = MetricReport()
    n = g.n_vertices
    comp = g.component
    a = rng.integers(0, n, p["pairs"])
    b = rng.integers(0, n, p["pairs"])
    # pairs are redrawn within the first vertex's component
    for i in np.flatnonzero(comp[a] != comp[b]):
        members = np.flatnonzero(comp == comp[a[i]])
        b[i] = members[rng.integers(0, len(members))]
    rep.add(quasi_isometry_check(g, max(fs.D, 1), np.column_stack([a, b])))

    m = margins(g)
    R_max = p["R_max"] or max(1, (int(m.max()) - 1) // 4)
    ok = np.flatnonzero(m >= 4 * R_max)
    if len(ok):
        centers = np.sort(rng.choice(ok, size=min(p["centers"], len(ok)), replace=False))
        rep.add(doubling_report(g, centers, R_max))
        radii = list(range(1, R_max + 1))
        rep.add(quadratic_growth_check(g, centers, radii))
        probes = {name: _field(name, g.coords) for name in ("x", "y", "xy", "x2-y2")}
        probes["random"] = rng.standard_normal(n)
        rep.add(poincare_report(g, centers, radii, probes))
    elif p["R_max"]:
        raise ValueError(f"no vertex has margin >= {4 * R_max}")
    out = rep.to_dict()
    out["D"] = fs.D
    return out


def _cmd_figure(cfg):
    p = cfg.params
    g = _load_graph(cfg)
    edges = g.edges()
    if p["field"] is not None:
        doc = json.loads(Path(p["field"]).read_text())
        vals = np.asarray(doc["values"], dtype=float)
        if vals.shape != (g.n_vertices,):
            raise ValueError("field length does not match the packing")
        t = triangulate_window(g, trace_faces(g), p["policy"])
        svg = render_svg(g.coords, circles=False, triangles=t.triangles,
                         tri_values=vals[t.triangles].mean(axis=1))
        view = "field"
    elif p["mesh"]:
        t = triangulate_window(g, trace_faces(g), p["policy"])
        svg = render_svg(g.coords, edges=edges, triangles=t.triangles)
        view = "mesh"
    else:
        svg = render_svg(g.coords, edges=edges)
        view = "disks"
    counts = {"circles": svg.count("<circle "), "edges": svg.count("<line "),
              "triangles": svg.count("<polygon ")}
    out = {"view": view, **counts}
    if p["svg"] is not None:
        Path(p["svg"]).write_text(svg)
        out["svg_path"] = str(p["svg"])
    else:
        out["svg"] = svg
    return out


COMMANDS = {
    "generate": _cmd_generate,
    "graph": _cmd_graph,
    "faces": _cmd_faces,
    "triangulate": _cmd_triangulate,
    "dirichlet": _cmd_dirichlet,
    "mvi": _cmd_mvi,
    "dim": _cmd_dim,
    "heat": _cmd_heat,
    "metrics": _cmd_metrics,
    "figure": _cmd_figure,
}


def run(cfg: RunConfig) -> dict:
    """Execute a validated configuration and return its report."""
    report = COMMANDS[cfg.command](cfg)
    report["command"] = cfg.command
    return report


def _fail(kind, exc, code):
    sys.stderr.write(json.dumps({"error": str(exc), "kind": kind, "exit": code}) + "\n")
    return code


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    try:
        cfg = parse_config(argv)
        text = dumps(run(cfg))
        if cfg.out is not None:
            cfg.out.write_text(text)
        else:
            sys.stdout.write(text)
    except (ConvergenceError, RetryBudgetExhausted, GeometryError, np.linalg.LinAlgError) as e:
        return _fail(type(e).__name__, e, EXIT_NUMERIC)
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as e:
        return _fail(type(e).__name__, e, EXIT_IO)
    except (ConfigError, InvalidPackingError, ValueError, KeyError, TypeError) as e:
        return _fail(type(e).__name__, e, EXIT_INVALID)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
