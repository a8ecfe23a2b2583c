"""SVG figures: shapes, the cone, the optimal stroke and swim snapshots.

Figures are written as SVG under fixed rc settings (no timestamps, fixed id
salt) so identical inputs give identical bytes.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from swim.geometry import SQRT2, LocatedShape, ShapePoint, cone_inequalities, sample_boundary  # noqa: E402

RC = {
    "svg.hashsalt": "swim",
    "svg.fonttype": "path",
    "font.size": 9,
    "axes.linewidth": 0.8,
    "lines.linewidth": 1.2,
    "figure.dpi": 100,
}

CONTACT_COLORS = {"g1": "#1f77b4", "g2": "#2ca02c", "g3": "#9467bd"}

# Y, Z on the cross-section W = 1: two ellipses and six cusped shapes
FIG1_POINTS = [
    ((0.4, 0.0), "interior"),
    ((-0.5, 0.0), "interior"),
    ((1 - SQRT2 * 0.25, 0.25), "g1"),
    ((1 - SQRT2 * 0.55, 0.55), "g1"),
    ((1 - SQRT2 * 0.25, -0.25), "g2"),
    ((1 - SQRT2 * 0.55, -0.55), "g2"),
    ((2 * 0.4**2 - 1, 0.4), "g3"),
    ((2 * 0.4**2 - 1, -0.4), "g3"),
]


def save_svg(fig, path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)


def _closed(z: np.ndarray) -> np.ndarray:
    return np.append(z, z[:1])


def render_shape(located: LocatedShape, path, n: int = 1024, title: str | None = None) -> None:
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(4, 4))
        z = _closed(sample_boundary(located, n).points)
        ax.fill(z.real, z.imag, color="#dbe9f6", lw=0)
        ax.plot(z.real, z.imag, color="k")
        ax.plot([z[0].real], [z[0].imag], "o", color="r", ms=4)
        ax.set_aspect("equal")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        s = located.shape
        ax.set_title(title or f"W={s.W:g}, Y={s.Y:g}, Z={s.Z:g}")
        save_svg(fig, path)


def render_cone_figure(path, n: int = 1024) -> None:
    """Cross-section W = 1 of the cone with eight marked shapes and their curves."""
    with plt.rc_context(RC):
        fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(9, 4.2))
        yy, zz = np.meshgrid(np.linspace(-1.3, 1.3, 401), np.linspace(-1.0, 1.0, 321))
        g = np.stack(cone_inequalities(np.ones_like(yy), yy, zz))
        ax0.contourf(yy, zz, g.min(axis=0), levels=[0, 10], colors=["#eeeeee"])
        for k, name in enumerate(("g1", "g2", "g3")):
            ax0.contour(yy, zz, g[k], levels=[0], colors=[CONTACT_COLORS[name]], linewidths=0.8)
        cmap = plt.get_cmap("tab10")
        for i, ((Y, Z), _kind) in enumerate(FIG1_POINTS):
            color = cmap(i)
            ax0.plot([Y], [Z], "o", color=color, ms=5)
            z = _closed(sample_boundary(LocatedShape(ShapePoint(1.0, Y, Z)), n).points)
            col, row = i % 4, i // 4
            off = complex(3.2 * col, -3.2 * row)
            ax1.plot((z + off).real, (z + off).imag, color=color)
        ax0.set_xlabel("Y")
        ax0.set_ylabel("Z")
        ax0.set_title("cone cross-section at W = 1")
        ax0.set_aspect("equal")
        ax1.set_aspect("equal")
        ax1.axis("off")
        save_svg(fig, path)


def render_stroke_domain(stroke_nodes: np.ndarray, contacts: list[dict], path) -> None:
    """The stroke in the (Y, Z) chart of the unit-area surface, with the cone boundary."""
    W, Y, Z = np.asarray(stroke_nodes).T
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(6, 3.6))
        ylo, yhi = min(-2.5, Y.min() - 0.3), max(1.2, Y.max() + 0.3)
        yy, zz = np.meshgrid(np.linspace(ylo, yhi, 501), np.linspace(-1.0, 1.0, 301))
        ww = np.sqrt(1 + yy * yy + zz * zz)
        g = np.stack(cone_inequalities(ww, yy, zz))
        ax.contourf(yy, zz, g.min(axis=0), levels=[0, 1e6], colors=["#eeeeee"])
        for k, name in enumerate(("g1", "g2", "g3")):
            ax.contour(yy, zz, g[k], levels=[0], colors=["k"], linewidths=0.8)
        ax.plot(np.append(Y, Y[0]), np.append(Z, Z[0]), color="r", lw=1.6)
        n = len(Y)
        for arc in contacts:
            idx = [(arc["start"] + j) % n for j in range(arc["nodes"])]
            ax.plot(Y[idx], Z[idx], color=CONTACT_COLORS.get(arc["constraint"], "b"), lw=3, alpha=0.7)
        ax.plot([Y[0]], [Z[0]], "o", color="r", ms=4)
        ax.set_xlabel("Y")
        ax.set_ylabel("Z")
        ax.set_aspect("equal")
        ax.set_title("stroke on the unit-area surface (W = sqrt(1 + Y² + Z²))")
        save_svg(fig, path)


def render_swim_frames(shapes: np.ndarray, X: np.ndarray, t: np.ndarray, path, n: int = 512) -> None:
    """Snapshots stacked vertically, each at its swim position, with a body marker."""
    shapes = np.asarray(shapes)
    with plt.rc_context(RC):
        extent = np.max(np.abs(shapes).sum(axis=1))
        gap = 2.2 * extent
        fig, ax = plt.subplots(figsize=(4, 1.2 + 0.9 * len(shapes)))
        markers = 2 * np.pi * np.arange(4) / 4
        for k, (s, x, tk) in enumerate(zip(shapes, X, t)):
            loc = LocatedShape(ShapePoint.from_array(s), float(x))
            z = _closed(sample_boundary(loc, n).points) - 1j * gap * k
            ax.plot(z.real, z.imag, color="k", lw=1.0)
            zm = np.array([z[int(round(m / (2 * np.pi) * n)) % n] for m in markers])
            ax.plot(zm.real, zm.imag, "o", color="r", ms=3)
            ax.text(z.real.max() + 0.3 * extent, -gap * k, f"t={tk:.3f}", va="center")
        ax.axvline(float(X[0]), color="#bbbbbb", lw=0.6, ls="--")
        ax.axvline(float(X[-1]), color="#bbbbbb", lw=0.6, ls="--")
        ax.set_aspect("equal")
        ax.set_yticks([])
        ax.set_xlabel("x")
        save_svg(fig, path)


def render_flow_field(x, y, vx, vy, boundary: np.ndarray, path) -> None:
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(5, 5))
        b = _closed(boundary)
        ax.fill(b.real, b.imag, color="#dbe9f6", lw=0)
        ax.plot(b.real, b.imag, color="k")
        ax.quiver(x, y, vx, vy, angles="xy", color="#444444", width=0.003)
        ax.set_aspect("equal")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        save_svg(fig, path)


def render_series(x, ys: dict, path, xlabel: str, ylabel: str, logx: bool = False, logy: bool = False) -> None:
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        for label, y in ys.items():
            ax.plot(x, y, "o-", label=label, ms=4)
        if logx:
            ax.set_xscale("log")
        if logy:
            ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.legend(frameon=False)
        save_svg(fig, path)


def render_trace(trace: list[dict], path) -> None:
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        vals = np.array([r["objective"] for r in trace])
        ax.plot(np.arange(len(vals)), vals, lw=0.8)
        ax.set_yscale("log")
        ax.set_xlabel("accepted iteration")
        ax.set_ylabel("penalized objective")
        save_svg(fig, path)
