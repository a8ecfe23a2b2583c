"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line (shown in the pytest terminal summary) and
then asserts. Run standalone with ``python3 tests/test_acceptance.py`` to get
just the report.
"""

import contextlib
import functools
import hashlib
import io as _io
import math
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE_LINES, random_chart_loop, random_interior_shapes, random_space_loop  # noqa: E402

from swim import io  # noqa: E402
from swim.cli import main  # noqa: E402
from swim.flow import (  # noqa: E402
    boundary_velocity,
    power_closed_form,
    power_contour,
    stokes_residual,
    velocity,
    with_connection,
)
from swim.geometry import (  # noqa: E402
    SQRT2,
    ShapePoint,
    area,
    classify_array,
    map_value,
    LocatedShape,
    boundary_derivative,
    project_to_unit_area,
    sample_boundary,
    self_intersects,
)
from swim.optimize import OptimizationConfig, el_fit, optimize  # noqa: E402
from swim.stroke import Stroke, circle_stroke, drag, length, displacement, scale  # noqa: E402


def report(k: int, ok: bool, detail: str) -> bool:
    line = f"{'PASS' if ok else 'FAIL'}  criterion {k:2d}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def run_cli(*argv) -> tuple[int, str]:
    buf = _io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main([str(a) for a in argv])
    return code, buf.getvalue()


def tree_digest(root: Path) -> dict[str, str]:
    return {str(p.relative_to(root)): hashlib.sha256(p.read_bytes()).hexdigest() for p in sorted(root.rglob("*")) if p.is_file()}


@functools.lru_cache(maxsize=None)
def default_cli_optimize() -> tuple[Path, int, float]:
    out = Path(tempfile.mkdtemp(prefix="swim-opt-"))
    t0 = time.perf_counter()
    code, _ = run_cli("optimize", "--out", out)
    return out, code, time.perf_counter() - t0


@functools.lru_cache(maxsize=None)
def optimum_512():
    return optimize(OptimizationConfig(n_nodes=512))


# --- criteria ----------------------------------------------------------------


def criterion_1() -> bool:
    out, code, elapsed = default_cli_optimize()
    res = io.read_json(out / "result.json")
    arcs = res["contacts"]
    angles = [a[k] for a in arcs for k in ("entry_angle", "exit_angle")]
    max_angle = max(angles) if angles else math.inf
    checks = {
        "converged": code == 0 and res["converged"],
        "drag": 8.92 <= res["drag"] <= 9.32,
        "arcs": len(arcs) == 4,
        "angles": max_angle <= 1e-2,
        "runtime": elapsed <= 300,
    }
    failed = [k for k, v in checks.items() if not v]
    detail = (
        f"optimal drag {res['drag']:.5f} (target [8.92, 9.32]), {len(arcs)} contact arcs, "
        f"max contact angle {max_angle:.4f} rad (≤ 1e-2), {elapsed:.1f} s"
        + (f"; failing: {', '.join(failed)}" if failed else "")
    )
    return report(1, not failed, detail)


def criterion_2() -> bool:
    t0 = time.perf_counter()
    r = 0.01
    ratio = drag(circle_stroke(1.0, r, 4096)) * r * r / 8
    d10 = drag(circle_stroke(1.0, 0.1, 4096))
    elapsed = time.perf_counter() - t0
    ok = 0.995 <= ratio <= 1.005 and abs(d10 - 800) <= 0.05 * 800 and elapsed < 10
    return report(2, ok, f"drag·r²/8 = {ratio:.7f} at r=0.01, drag = {d10:.4f} at r=0.1, {elapsed:.2f} s")


def criterion_3() -> bool:
    rng = np.random.default_rng(3)
    worst = 0.0
    for s in random_interior_shapes(rng, 1000):
        rate = with_connection(s, *rng.normal(size=3))
        zeta = np.exp(1j * rng.uniform(0, 2 * np.pi))
        zdot = boundary_velocity(s, rate, zeta)
        err = abs(velocity(s, rate, zeta) - zdot) / max(abs(zdot), 1.0)
        worst = max(worst, err)
    return report(3, worst <= 1e-10, f"max |v - ż|/max(|ż|,1) = {worst:.2e} over 1000 cases (≤ 1e-10)")


def criterion_4() -> bool:
    rng = np.random.default_rng(4)
    worst = 0.0
    for s in random_interior_shapes(rng, 100, margin=1e-2):
        rate = with_connection(s, *rng.normal(size=3))
        exact = power_closed_form(rate)
        worst = max(worst, abs(power_contour(s, rate, 1.0, 512) - exact) / exact)
    return report(4, worst <= 1e-6, f"max relative error contour vs closed form = {worst:.2e} over 100 cases (≤ 1e-6)")


def criterion_5() -> bool:
    # unit-area shapes fix the body scale that the stencil spacing h is measured against
    rng = np.random.default_rng(5)
    r3, r4 = [], []
    for s in random_interior_shapes(rng, 100, margin=1e-2):
        s = project_to_unit_area(s)
        rate = with_connection(s, *rng.normal(size=3))
        zeta = rng.uniform(1.2, 3.0) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        z0 = complex(map_value(s, zeta))
        r3.append(stokes_residual(s, rate, 1.0, z0, 1e-3, zeta))
        r4.append(stokes_residual(s, rate, 1.0, z0, 1e-4, zeta))
    r3, r4 = np.array(r3), np.array(r4)
    worst3 = float(r3.max())
    shrink = r3.max(axis=0) / r4.max(axis=0)
    ok = worst3 <= 1e-3 and bool(np.all((shrink > 50) & (shrink < 200)))
    return report(
        5, ok,
        f"max residual at h=1e-3 {worst3:.2e} (≤ 1e-3); shrink of max residual h=1e-3→1e-4: "
        f"divergence {shrink[0]:.1f}, momentum {shrink[1]:.1f} (≈ 100)",
    )


def cubic_oracle(W, Y, Z):
    """+1 when every root of Wζ³ - Yζ - √2 Z lies in |ζ| < 1, with the largest root modulus."""
    rho = np.array([np.abs(np.roots([w, 0.0, -y, -SQRT2 * z])).max() for w, y, z in zip(W, Y, Z)])
    return np.where(rho < 1, 1, -1), rho


def criterion_6() -> bool:
    rng = np.random.default_rng(6)
    n = 100_000
    W = rng.uniform(0.05, 2.0, n)
    Y = rng.uniform(-1.6, 1.6, n) * W
    Z = rng.uniform(-1.2, 1.2, n) * W
    truth, rho = cubic_oracle(W, Y, Z)
    keep = np.abs(rho - 1) > 1e-6
    got = classify_array(W, Y, Z, 1e-12)
    agree = float(np.mean(got[keep] == truth[keep]))
    interior = [ShapePoint(*p) for p in np.column_stack([W, Y, Z])[(got == 1) & keep][:1000]]
    crossings = sum(self_intersects(s, 2048) for s in interior)
    ok = agree == 1.0 and crossings == 0 and len(interior) == 1000
    return report(
        6, ok,
        f"agreement {agree:.6f} on {int(keep.sum())} points; {crossings} self-intersecting of {len(interior)} interior shapes",
    )


def criterion_7() -> bool:
    rng = np.random.default_rng(7)
    worst = 0.0
    for s in random_interior_shapes(rng, 100):
        # trapezoidal rule on (1/2)∮ (x dy - y dx) with the exact tangent
        theta = 2 * np.pi * np.arange(4096) / 4096
        z = sample_boundary(LocatedShape(s), 4096).points
        dz_dtheta = 1j * np.exp(1j * theta) * boundary_derivative(s, theta)
        shoelace = np.pi * np.mean(np.imag(np.conj(z) * dz_dtheta))
        worst = max(worst, abs(shoelace - area(s)) / area(s))
    return report(7, worst <= 1e-8, f"max relative area error {worst:.2e} over 100 shapes (≤ 1e-8)")


def criterion_8() -> bool:
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(20):
        st = Stroke(random_space_loop(rng, 64))
        base = drag(st)
        for lam in (0.5, 2.0, 10.0):
            worst = max(worst, abs(drag(scale(st, lam)) - base) / base)
    return report(8, worst <= 1e-12, f"max relative drag change under scaling {worst:.2e} (≤ 1e-12)")


def criterion_9() -> bool:
    rng = np.random.default_rng(9)
    min_gap, uniform_gap = math.inf, 0.0
    for _ in range(20):
        nodes = random_space_loop(rng, int(rng.integers(24, 96)))
        base = Stroke(nodes)
        const = drag(base)
        for _ in range(100):
            dt = rng.uniform(0.05, 1.0, len(nodes))
            times = np.concatenate([[0.0], np.cumsum(dt[:-1])])
            timed = Stroke(nodes, times, float(dt.sum()))
            min_gap = min(min_gap, (drag(timed) - const) / const)
        seg = np.linalg.norm(base.segments(), axis=1)
        times = np.concatenate([[0.0], np.cumsum(seg[:-1])])
        uniform = Stroke(nodes, 3.7 * times, 3.7 * seg.sum())
        uniform_gap = max(uniform_gap, abs(drag(uniform) - const) / const)
    ok = min_gap > 1e-9 and uniform_gap <= 1e-9
    return report(
        9, ok,
        f"smallest relative excess of random timings {min_gap:.2e} (> 1e-9); arclength timing gap {uniform_gap:.2e} (≤ 1e-9)",
    )


def criterion_10() -> bool:
    with tempfile.TemporaryDirectory() as d:
        code, _ = run_cli("experiment", "large-stroke", "--out", d)
        header, rows = io.read_csv(Path(d) / "large-stroke.csv")
    ell, X, dr = rows[:, 0], rows[:, 2], rows[:, 3]
    increasing = bool(np.all(np.diff(dr) > 0))
    growth = X[2] / X[0]
    bound = 3 * math.log(100) / math.log(10)
    ok = code == 0 and header == list(io.LARGE_STROKE_COLUMNS) and increasing and growth <= bound
    return report(
        10, ok,
        f"drag {', '.join(f'{v:.1f}' for v in dr)} strictly increasing: {increasing}; X(100)/X(10) = {growth:.3f} (≤ {bound:.3f})",
    )


def _cli_runs(root: Path, stroke_file: Path) -> list[int]:
    root.mkdir()
    codes = []
    for argv in (
        ("shape", "render", 1, 0.2, 0.565685, "--out", root / "shape.svg"),
        ("shape", "render", "--cone-figure", "--out", root / "cone.svg"),
        ("stroke", "simulate", stroke_file, "--frames", 8, "--out", root / "sim"),
        ("flow", "field", 1.5, 0.3, 0.2, 0.1, -0.2, 0.3, "--out", root / "flow.csv", "--figure", root / "flow.svg"),
        ("experiment", "squirmer-scan", "--out", root / "exp"),
        ("experiment", "large-stroke", "--out", root / "exp"),
    ):
        code, text = run_cli(*argv)
        codes.append(code)
        (root / f"stdout-{len(codes)}.txt").write_text(text.replace(str(root), "<out>"))
    for argv in (("shape", "check", 1, 0.2, 0.565685), ("stroke", "metrics", stroke_file)):
        code, text = run_cli(*argv)
        codes.append(code)
        (root / f"stdout-{len(codes)}.txt").write_text(text.replace(str(root), "<out>"))
    return codes


def criterion_11() -> bool:
    first, _, _ = default_cli_optimize()
    stroke_file = first / "stroke.json"
    with tempfile.TemporaryDirectory() as d:
        second = Path(d) / "opt"
        run_cli("optimize", "--out", second)
        same_opt = tree_digest(first) == tree_digest(second)
        a = _cli_runs(Path(d) / "a", stroke_file)
        b = _cli_runs(Path(d) / "b", stroke_file)
        da, db = tree_digest(Path(d) / "a"), tree_digest(Path(d) / "b")
    differing = sorted(k for k in da if da[k] != db.get(k))
    ok = same_opt and not differing and a == b and all(c == 0 for c in a)
    return report(
        11, ok,
        f"optimize outputs identical: {same_opt}; {len(da)} other files compared, differing: {differing or 'none'}",
    )


def criterion_12() -> bool:
    res = optimum_512()
    rng = np.random.default_rng(12)
    control = Stroke(random_chart_loop(rng, 512))
    _, control_resid = el_fit(control)
    ok = res.converged and res.el_residual is not None and res.el_residual <= 5e-2 and control_resid >= 10 * res.el_residual
    return report(
        12, ok,
        f"optimum (n=512) EL residual {res.el_residual:.2e} (≤ 5e-2); random loop {control_resid:.2e} "
        f"(ratio {control_resid / res.el_residual:.0f}, ≥ 10)",
    )


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11, criterion_12]


@pytest.mark.slow
@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i + 1:02d}" for i in range(len(CRITERIA))])
def test_acceptance(criterion):
    assert criterion()


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria pass")
    sys.exit(0 if all(results) else 1)
