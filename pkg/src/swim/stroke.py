"""Closed strokes in shape space and their swimming metrics.

A stroke is a closed polyline through shapes (W, Y, Z). Its net swim step is
the loop integral of the connection A dY, the dissipation uses the
dissipation metric 4πμ(dW² + dY² + dZ²)/dt, and the drag coefficient

    δ = D τ / (4πμ X²)

reduces to (|γ| / X)² for a stroke traversed at constant speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from swim.geometry import SQRT2, LocatedShape, ShapePoint, classify_array, cone_margins

# nodes may sit this far outside the cone (relative) and still count as physical
PHYSICAL_TOL = 1e-7


class NonSwimmingStrokeError(ValueError):
    """The stroke produces no net displacement, so its drag is undefined."""


class InvalidStrokeError(ValueError):
    pass


@lru_cache(maxsize=None)
def gauss_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    return (x + 1) / 2, w / 2


@dataclass(frozen=True, eq=False)
class Stroke:
    """Closed, oriented polyline in shape space.

    ``times[i]`` is the time at which node i is visited; the closing segment
    from the last node back to the first takes ``period + times[0] - times[-1]``.
    Without timing, the constant-speed convention with period 1 applies.
    """

    nodes: np.ndarray
    times: np.ndarray | None = None
    period: float | None = None

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        if nodes.ndim != 2 or nodes.shape[1] != 3 or len(nodes) < 3:
            raise InvalidStrokeError("a stroke needs at least 3 nodes of (W, Y, Z)")
        if not np.isfinite(nodes).all():
            raise InvalidStrokeError("stroke nodes must be finite")
        seg = np.roll(nodes, -1, axis=0) - nodes
        if np.any(np.linalg.norm(seg, axis=1) == 0):
            raise InvalidStrokeError("stroke has a zero-length segment")
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        if (self.times is None) != (self.period is None):
            raise InvalidStrokeError("times and period must be given together")
        if self.times is not None:
            t = np.array(self.times, dtype=float)
            if t.shape != (len(nodes),):
                raise InvalidStrokeError("one time per node is required")
            if not self.period > 0:
                raise InvalidStrokeError("period must be positive")
            if np.any(np.diff(t) <= 0) or not self.period + t[0] - t[-1] > 0:
                raise InvalidStrokeError("times must be strictly increasing within one period")
            t.setflags(write=False)
            object.__setattr__(self, "times", t)
            object.__setattr__(self, "period", float(self.period))

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def timed(self) -> bool:
        return self.times is not None

    def segments(self) -> np.ndarray:
        return np.roll(self.nodes, -1, axis=0) - self.nodes

    def durations(self) -> np.ndarray:
        if self.times is None:
            seg = np.linalg.norm(self.segments(), axis=1)
            return seg / seg.sum()
        return np.diff(np.append(self.times, self.times[0] + self.period))

    def is_physical(self, tol: float = PHYSICAL_TOL) -> bool:
        W, Y, Z = self.nodes.T
        return bool(np.all(cone_margins(W, Y, Z) >= -tol))

    def require_physical(self, tol: float = PHYSICAL_TOL) -> "Stroke":
        if not self.is_physical(tol):
            raise InvalidStrokeError("stroke leaves the physical cone")
        return self

    def reversed(self) -> "Stroke":
        nodes = self.nodes[::-1]
        if self.times is None:
            return Stroke(nodes)
        d = self.durations()
        # segment i of the reversed stroke is segment n-2-i of the original
        rd = np.roll(d[::-1], -1)
        times = np.concatenate([[0.0], np.cumsum(rd[:-1])])
        return Stroke(nodes, times, self.period)

    def rotated(self, k: int) -> "Stroke":
        """Same closed stroke starting at node k."""
        nodes = np.roll(self.nodes, -k, axis=0)
        if self.times is None:
            return Stroke(nodes)
        d = np.roll(self.durations(), -k)
        return Stroke(nodes, np.concatenate([[0.0], np.cumsum(d[:-1])]), self.period)

    def to_dict(self) -> dict:
        out = {"nodes": self.nodes.tolist()}
        if self.times is not None:
            out["times"] = self.times.tolist()
            out["period"] = self.period
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "Stroke":
        return cls(np.asarray(d["nodes"], float), d.get("times"), d.get("period"))


@dataclass(frozen=True)
class StrokeMetrics:
    length: float
    displacement: float
    dissipation: float
    period: float
    drag: float | None
    reason: str | None = None

    def to_dict(self) -> dict:
        d = {
            "length": self.length,
            "displacement": self.displacement,
            "dissipation": self.dissipation,
            "period": self.period,
            "drag": self.drag,
        }
        if self.reason is not None:
            d["reason"] = self.reason
        return d


@dataclass(frozen=True)
class SwimTrace:
    t: np.ndarray
    X: np.ndarray
    shapes: np.ndarray  # (n+1, 3)

    @property
    def samples(self) -> list[tuple[float, LocatedShape]]:
        return [(float(t), LocatedShape(ShapePoint.from_array(s), float(x))) for t, s, x in zip(self.t, self.shapes, self.X)]


def length(stroke: Stroke) -> float:
    """Euclidean length of the closed polyline in (W, Y, Z)."""
    return float(np.linalg.norm(stroke.segments(), axis=1).sum())


def _segment_integrals(nodes: np.ndarray, seg: np.ndarray, order: int, upto: np.ndarray | float = 1.0) -> np.ndarray:
    """∫ A dY along each segment from its start to fraction ``upto``."""
    t, w = gauss_nodes(order)
    u = np.broadcast_to(np.asarray(upto, float), (len(nodes),))
    pts = nodes[:, None, :] + (u[:, None, None] * t[None, :, None]) * seg[:, None, :]
    if np.any(pts[..., 0] <= 0):
        raise ValueError("connection undefined for W <= 0 along the stroke")
    A = pts[..., 2] / (SQRT2 * pts[..., 0])
    return u * seg[:, 1] * (A @ w)


def displacement(stroke: Stroke, quad_order: int = 4) -> float:
    """Net swim step X(γ) = ∮ A dY, Gauss-Legendre per segment."""
    if quad_order < 1:
        raise ValueError("quad_order must be >= 1")
    if np.any(stroke.nodes[:, 0] <= 0):
        raise ValueError("connection undefined for W <= 0 along the stroke")
    return float(_segment_integrals(stroke.nodes, stroke.segments(), quad_order).sum())


def dissipation(stroke: Stroke, mu: float = 1.0) -> float:
    """4πμ Σ |Δγ|² / Δt with constant velocity on each segment."""
    if not stroke.timed:
        raise ValueError("dissipation needs a timed stroke")
    if not mu > 0:
        raise ValueError("viscosity must be positive")
    seg2 = np.sum(stroke.segments() ** 2, axis=1)
    return float(4 * math.pi * mu * np.sum(seg2 / stroke.durations()))


def _check_swimming(X: float, L: float):
    if not abs(X) > 1e-14 * L * L:
        raise NonSwimmingStrokeError("non-swimming stroke: zero net displacement")


def drag(stroke: Stroke, mu: float = 1.0, quad_order: int = 4) -> float:
    """Swimming drag coefficient δ; μ cancels."""
    X = displacement(stroke, quad_order)
    L = length(stroke)
    _check_swimming(X, L)
    if stroke.timed:
        return dissipation(stroke, mu) * stroke.period / (4 * math.pi * mu * X * X)
    return (L / X) ** 2


def metrics(stroke: Stroke, mu: float = 1.0, quad_order: int = 4) -> StrokeMetrics:
    L = length(stroke)
    X = displacement(stroke, quad_order)
    timed = stroke if stroke.timed else reparameterize_constant_speed(stroke, 1.0)
    D = dissipation(timed, mu)
    try:
        _check_swimming(X, L)
    except NonSwimmingStrokeError as exc:
        return StrokeMetrics(L, X, D, timed.period, None, str(exc))
    return StrokeMetrics(L, X, D, timed.period, D * timed.period / (4 * math.pi * mu * X * X))


def reparameterize_constant_speed(stroke: Stroke, period: float = 1.0) -> Stroke:
    """Times proportional to cumulative arclength."""
    if not period > 0:
        raise ValueError("period must be positive")
    seg = np.linalg.norm(stroke.segments(), axis=1)
    times = period * np.concatenate([[0.0], np.cumsum(seg[:-1])]) / seg.sum()
    return Stroke(stroke.nodes, times, period)


def scale(stroke: Stroke, lam: float) -> Stroke:
    if not lam > 0:
        raise ValueError("scale factor must be positive")
    return Stroke(stroke.nodes * lam, stroke.times, stroke.period)


def simulate(stroke: Stroke, n: int, quad_order: int = 4) -> SwimTrace:
    """Integrate dX = A dY in time; n+1 samples from t = 0 to τ.

    Stroke times are measured from the first node.
    """
    if n < stroke.n:
        raise ValueError("need at least as many samples as stroke nodes")
    timed = stroke if stroke.timed else reparameterize_constant_speed(stroke, 1.0)
    nodes, seg = timed.nodes, timed.segments()
    starts = timed.times - timed.times[0]
    dur = timed.durations()
    per_seg = _segment_integrals(nodes, seg, quad_order)
    cum = np.concatenate([[0.0], np.cumsum(per_seg)])

    t = timed.period * np.arange(n + 1) / n
    k = np.clip(np.searchsorted(starts, t, side="right") - 1, 0, timed.n - 1)
    u = np.clip((t - starts[k]) / dur[k], 0.0, 1.0)
    partial = _segment_integrals(nodes[k], seg[k], quad_order, u)
    X = cum[k] + partial
    shapes = nodes[k] + u[:, None] * seg[k]
    # the last sample closes the loop exactly
    X[-1] = cum[-1]
    shapes[-1] = nodes[0]
    return SwimTrace(t, X, shapes)


def circle_stroke(W0: float, r: float, n: int = 256, orientation: int = 1) -> Stroke:
    """Small circle of radius r in the Y-Z plane at W = W0."""
    if n < 16:
        raise ValueError("n must be at least 16")
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    if not r > 0 or not W0 > SQRT2 * r:
        raise InvalidStrokeError("circle leaves the interior of the physical cone")
    phi = orientation * 2 * np.pi * np.arange(n) / n
    nodes = np.column_stack([np.full(n, float(W0)), r * np.cos(phi), r * np.sin(phi)])
    W, Y, Z = nodes.T
    if not np.all(classify_array(W, Y, Z, 1e-12) == 1):
        raise InvalidStrokeError("circle leaves the interior of the physical cone")
    return Stroke(nodes)


def squirmer_drag_analytic(W0: float, r: float) -> float:
    """Drag of a small circular stroke: 8 (W0 / r)²."""
    if not (W0 > 0 and r > 0):
        raise ValueError("W0 and r must be positive")
    return 8.0 * (W0 / r) ** 2


def _rounded_rectangle(y0: float, y1: float, z0: float, z1: float, radius: float, n: int) -> np.ndarray:
    """n points evenly spaced in arclength on a rounded rectangle, clockwise in (Y, Z)."""
    ql = 0.5 * math.pi * radius
    straight = [y1 - y0 - 2 * radius, z1 - z0 - 2 * radius]
    # top edge left→right, right arc, right edge down, ..., clockwise
    pieces = [
        ("line", (y0 + radius, z1), (y1 - radius, z1), straight[0]),
        ("arc", (y1 - radius, z1 - radius), (math.pi / 2, 0.0), ql),
        ("line", (y1, z1 - radius), (y1, z0 + radius), straight[1]),
        ("arc", (y1 - radius, z0 + radius), (0.0, -math.pi / 2), ql),
        ("line", (y1 - radius, z0), (y0 + radius, z0), straight[0]),
        ("arc", (y0 + radius, z0 + radius), (-math.pi / 2, -math.pi), ql),
        ("line", (y0, z0 + radius), (y0, z1 - radius), straight[1]),
        ("arc", (y0 + radius, z1 - radius), (math.pi, math.pi / 2), ql),
    ]
    lengths = np.array([p[3] for p in pieces])
    edges = np.concatenate([[0.0], np.cumsum(lengths)])
    s = edges[-1] * np.arange(n) / n
    out = np.empty((n, 2))
    for i, si in enumerate(s):
        k = min(int(np.searchsorted(edges, si, side="right") - 1), len(pieces) - 1)
        kind, a, b, ln = pieces[k]
        f = (si - edges[k]) / ln if ln > 0 else 0.0
        if kind == "line":
            out[i] = (a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1]))
        else:
            ang = b[0] + f * (b[1] - b[0])
            out[i] = (a[0] + radius * math.cos(ang), a[1] + radius * math.sin(ang))
    return out


def elongated_stroke(ell: float, w: float, n: int = 512) -> Stroke:
    """Long loop on the unit-area surface reaching out to Y = -ℓ.

    The loop is a rounded rectangle in the (Y, Z) chart over Y ∈ [-ℓ, -1],
    Z ∈ [-w, w], with corner radius w/2, lifted by W = √(1 + Y² + Z²) and
    oriented so that the step is positive.
    """
    if not (ell > 1 and ell > w > 0):
        raise ValueError("need ℓ > 1 and ℓ > w > 0")
    yz = _rounded_rectangle(-ell, -1.0, -w, w, w / 2, n)
    Y, Z = yz[:, 0], yz[:, 1]
    nodes = np.column_stack([np.sqrt(1 + Y * Y + Z * Z), Y, Z])
    stroke = Stroke(nodes)
    if not stroke.is_physical(0.0):
        raise InvalidStrokeError("elongated loop leaves the physical domain")
    if displacement(stroke) < 0:
        stroke = stroke.reversed()
    return stroke
