"""Command-line interface: ``swim <group> <command> ...``.

Exit codes: 0 success, 1 usage or I/O error, 2 non-physical input,
3 optimizer did not converge (artifacts are still written). μ = 1 throughout.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from swim import figures, io
from swim.flow import FlowDomainError, boundary_velocity, pressure, velocity, with_connection
from swim.geometry import LocatedShape, ShapePoint, area, cone_classify, map_value, sample_boundary
from swim.optimize import OptimizationConfig, OptimizationError, optimize
from swim.stroke import (
    InvalidStrokeError,
    Stroke,
    circle_stroke,
    drag,
    elongated_stroke,
    length,
    displacement,
    metrics,
    simulate,
    squirmer_drag_analytic,
)

EXIT_OK, EXIT_USAGE, EXIT_NONPHYSICAL, EXIT_NOT_CONVERGED = 0, 1, 2, 3

SQUIRMER_RADII = (0.2, 0.1, 0.05, 0.02, 0.01)
SQUIRMER_NODES = 4096
LARGE_STROKE_ELLS = (10.0, 30.0, 100.0)
LARGE_STROKE_WIDTH = 0.5
LARGE_STROKE_NODES = 4096
# relative cone margin below which a shape counts as cusped
SHAPE_TOL = 1e-6

class UsageError(Exception):
    pass


class NonPhysical(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _emit(obj) -> None:
    sys.stdout.write(io.dumps(obj))


def _outdir(path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _load_stroke(path) -> Stroke:
    try:
        stroke = Stroke.from_dict(io.read_json(path))
    except (KeyError, TypeError, InvalidStrokeError, json.JSONDecodeError) as exc:
        raise UsageError(f"invalid stroke file {path}: {exc}") from exc
    if not stroke.is_physical():
        raise NonPhysical("stroke leaves the physical cone")
    return stroke


# --- shape -------------------------------------------------------------------


def cmd_shape_check(args) -> int:
    s = ShapePoint(args.W, args.Y, args.Z)
    st = cone_classify(s, args.tol)
    g1, g2, g3 = st.g
    _emit(
        {
            "status": st.tag,
            "g1": g1,
            "g2": g2,
            "g3": g3,
            "area": area(s),
            "cusp_angles": list(st.cusp_angles),
        }
    )
    return EXIT_NONPHYSICAL if st.tag == "outside" else EXIT_OK


def cmd_shape_render(args) -> int:
    if args.cone_figure:
        figures.render_cone_figure(args.out, args.n)
        return EXIT_OK
    if None in (args.W, args.Y, args.Z):
        raise UsageError("shape render needs W Y Z (or --cone-figure)")
    s = ShapePoint(args.W, args.Y, args.Z)
    st = cone_classify(s, args.tol)
    if st.tag == "outside":
        raise NonPhysical(f"shape {s} is outside the physical cone")
    figures.render_shape(LocatedShape(s, args.X), args.out, args.n)
    return EXIT_OK


# --- stroke ------------------------------------------------------------------


def cmd_stroke_metrics(args) -> int:
    stroke = _load_stroke(args.stroke)
    _emit(metrics(stroke, mu=1.0).to_dict())
    return EXIT_OK


def cmd_stroke_simulate(args) -> int:
    stroke = _load_stroke(args.stroke)
    if args.frames < 1:
        raise UsageError("--frames must be positive")
    per_frame = max(1, math.ceil(stroke.n / args.frames))
    trace = simulate(stroke, args.frames * per_frame)
    out = _outdir(args.out)
    io.write_csv(out / "swim.csv", io.SWIM_COLUMNS, zip(trace.t, trace.X))
    idx = np.arange(0, len(trace.t), per_frame)
    figures.render_swim_frames(trace.shapes[idx], trace.X[idx], trace.t[idx], out / "frames.svg")
    _emit({"frames": len(idx), "displacement": float(trace.X[-1]), "csv": str(out / "swim.csv"), "svg": str(out / "frames.svg")})
    return EXIT_OK


# --- optimize ----------------------------------------------------------------


def cmd_optimize(args) -> int:
    cfg_dict = io.read_json(args.config) if args.config else {}
    try:
        cfg = OptimizationConfig.from_dict(cfg_dict)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid config: {exc}") from exc
    out = _outdir(args.out)
    try:
        res = optimize(cfg)
    except OptimizationError as exc:
        print(f"swim: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    report = res.to_dict()
    report.pop("trace")
    report["config"] = cfg.to_dict()
    io.write_json(out / "result.json", report)
    io.write_json(out / "stroke.json", res.stroke.to_dict())
    io.write_csv(out / "trace.csv", io.TRACE_COLUMNS, ([r[c] for c in io.TRACE_COLUMNS] for r in res.trace))
    figures.render_stroke_domain(res.stroke.nodes, res.contacts, out / "stroke.svg")
    figures.render_trace(res.trace, out / "trace.svg")
    _emit(
        {
            "converged": res.converged,
            "drag": res.drag,
            "displacement": res.displacement,
            "length": res.length,
            "contacts": len(res.contacts),
            "dual_q": res.dual_q,
            "el_residual": res.el_residual,
            "out": str(out),
        }
    )
    if not res.converged:
        print(f"swim: {res.message}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


# --- flow --------------------------------------------------------------------


def flow_grid(s: ShapePoint, rate, r_max: float, n_r: int, n_theta: int):
    radii = np.linspace(1.0, r_max, n_r)
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    zeta = (radii[:, None] * np.exp(1j * theta)[None, :]).ravel()
    z = map_value(s, zeta)
    v = velocity(s, rate, zeta)
    p = pressure(s, rate, 1.0, zeta)
    return zeta, z, v, p


def cmd_flow_field(args) -> int:
    s = ShapePoint(args.W, args.Y, args.Z)
    if cone_classify(s, SHAPE_TOL).tag != "interior":
        raise NonPhysical("flow field needs a smooth (interior) shape")
    if args.r_max < 1 or args.n_r < 2 or args.n_theta < 3:
        raise UsageError("grid needs r_max >= 1, n_r >= 2, n_theta >= 3")
    rate = with_connection(s, args.dW, args.dY, args.dZ)
    zeta, z, v, p = flow_grid(s, rate, args.r_max, args.n_r, args.n_theta)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    io.write_csv(out, io.FLOW_COLUMNS, zip(z.real, z.imag, v.real, v.imag, p))
    if args.figure:
        figures.render_flow_field(z.real, z.imag, v.real, v.imag, sample_boundary(LocatedShape(s), 512).points, args.figure)
    ring = np.abs(zeta) == 1.0
    slip = float(np.max(np.abs(v[ring] - boundary_velocity(s, rate, zeta[ring]))))
    _emit({"points": int(len(z)), "dX": rate.dX, "max_slip": slip, "csv": str(out)})
    return EXIT_OK


# --- experiments -------------------------------------------------------------


def squirmer_scan() -> list[tuple]:
    rows = []
    for r in SQUIRMER_RADII:
        d = drag(circle_stroke(1.0, r, SQUIRMER_NODES, orientation=-1))
        a = squirmer_drag_analytic(1.0, r)
        rows.append((r, d, a, d / a))
    return rows


def large_stroke_scan() -> list[tuple]:
    rows = []
    for ell in LARGE_STROKE_ELLS:
        st = elongated_stroke(ell, LARGE_STROKE_WIDTH, LARGE_STROKE_NODES)
        rows.append((ell, length(st), displacement(st), drag(st)))
    return rows


def cmd_experiment(args) -> int:
    out = _outdir(args.out)
    if args.name == "squirmer-scan":
        rows = squirmer_scan()
        io.write_csv(out / "squirmer-scan.csv", io.SQUIRMER_COLUMNS, rows)
        r = [row[0] for row in rows]
        figures.render_series(
            r, {"drag": [row[1] for row in rows], "8 (W0/r)^2": [row[2] for row in rows]},
            out / "squirmer-scan.svg", "r", "drag", logx=True, logy=True,
        )
    elif args.name == "large-stroke":
        rows = large_stroke_scan()
        io.write_csv(out / "large-stroke.csv", io.LARGE_STROKE_COLUMNS, rows)
        ell = [row[0] for row in rows]
        figures.render_series(
            ell, {"drag": [row[3] for row in rows]}, out / "large-stroke.svg", "loop extent", "drag", logx=True, logy=True,
        )
    else:
        raise UsageError(f"unknown experiment {args.name!r}")
    _emit({"experiment": args.name, "rows": [list(r) for r in rows]})
    return EXIT_OK


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="swim", description="Conformal-map swimmer toolkit")
    p.add_argument("-v", "--verbose", action="store_true")
    groups = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    shape = groups.add_parser("shape", help="single shapes").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    c = shape.add_parser("check", help="classify a shape against the physical cone")
    for name in ("W", "Y", "Z"):
        c.add_argument(name, type=float)
    c.add_argument("--tol", type=float, default=SHAPE_TOL)
    c.set_defaults(func=cmd_shape_check)
    c = shape.add_parser("render", help="render a shape boundary to SVG")
    for name in ("W", "Y", "Z"):
        c.add_argument(name, type=float, nargs="?")
    c.add_argument("--X", type=float, default=0.0)
    c.add_argument("--n", type=int, default=1024)
    c.add_argument("--tol", type=float, default=SHAPE_TOL)
    c.add_argument("--cone-figure", action="store_true", help="render the cone cross-section with sample shapes")
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_shape_render)

    stroke = groups.add_parser("stroke", help="closed strokes").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    c = stroke.add_parser("metrics", help="length, displacement, dissipation and drag")
    c.add_argument("stroke")
    c.set_defaults(func=cmd_stroke_metrics)
    c = stroke.add_parser("simulate", help="swim trajectory and snapshot strip")
    c.add_argument("stroke")
    c.add_argument("--frames", type=int, default=8)
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_stroke_simulate)

    c = groups.add_parser("optimize", help="least-drag stroke on the unit-area surface")
    c.add_argument("--config")
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_optimize)

    flow = groups.add_parser("flow", help="flow fields").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    c = flow.add_parser("field", help="velocity and pressure on a polar grid")
    for name in ("W", "Y", "Z", "dW", "dY", "dZ"):
        c.add_argument(name, type=float)
    c.add_argument("--r-max", type=float, default=4.0)
    c.add_argument("--n-r", type=int, default=16)
    c.add_argument("--n-theta", type=int, default=48)
    c.add_argument("--figure", help="also write a quiver plot (SVG) here")
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_flow_field)

    c = groups.add_parser("experiment", help="parameter scans")
    c.add_argument("name", choices=("squirmer-scan", "large-stroke"))
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"swim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (UsageError, OSError, json.JSONDecodeError) as exc:
        print(f"swim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NonPhysical, FlowDomainError) as exc:
        print(f"swim: non-physical input: {exc}", file=sys.stderr)
        return EXIT_NONPHYSICAL
    except ValueError as exc:
        print(f"swim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
