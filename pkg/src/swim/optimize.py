"""Least-drag stroke on the unit-area surface.

Strokes are transcribed as closed polylines in the chart (Y, Z) of the
surface W² - Y² - Z² = 1 (area π); W is lifted as √(1 + Y² + Z²). For n nodes
visited at equal time steps the drag of a stroke is

    E = n Σ|Δγ|² / X²,

which bounds (|γ|/X)² from above with equality at equal arclength spacing, so
minimizing E minimizes the constant-speed drag and also spaces the nodes
evenly. The three cone inequalities are imposed at every node with a
quadratic penalty whose weight grows geometrically; each penalty subproblem is
solved with L-BFGS. The mesh is refined by midpoint insertion.

After convergence the stroke is checked against the charged-particle picture:
away from the cone boundary, 8πμ γ̈ = q γ̇ × B (tangential part) with
B = ∇ × (A Ŷ).
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize

from swim.geometry import SQRT2, ShapePoint, _as_shape, cone_inequalities
from swim.stroke import NonSwimmingStrokeError, Stroke, displacement, gauss_nodes, length, reparameterize_constant_speed

log = logging.getLogger(__name__)

CONSTRAINT_NAMES = ("g1", "g2", "g3")


class OptimizationError(RuntimeError):
    pass


@dataclass(frozen=True)
class ChartPoint:
    Y: float
    Z: float


@dataclass(frozen=True)
class FieldVector:
    B: tuple[float, float, float]


@dataclass
class OptimizationConfig:
    n_nodes: int = 256
    max_outer_iters: int = 10
    penalty_init: float = 10.0
    penalty_growth: float = 10.0
    grad_tol: float = 1e-6
    feas_tol: float = 1e-8
    refine_levels: int = 3
    seed: int = 0
    init_a: float = 1.0
    init_b: float = 0.5
    init_center: float = 0.0
    init_jitter: float = 1e-3
    init_stroke: list | None = None
    max_inner_iters: int = 20000
    mu: float = 1.0

    def __post_init__(self):
        if self.n_nodes < 32:
            raise ValueError("n_nodes must be at least 32")
        if self.refine_levels < 1:
            raise ValueError("refine_levels must be at least 1")
        if self.n_nodes % 2 ** (self.refine_levels - 1):
            raise ValueError("n_nodes must be divisible by 2**(refine_levels - 1)")
        if self.n_nodes // 2 ** (self.refine_levels - 1) < 16:
            raise ValueError("coarsest level would have fewer than 16 nodes")
        if not (self.penalty_init > 0 and self.penalty_growth > 1):
            raise ValueError("penalty_init must be positive and penalty_growth > 1")
        if not (self.grad_tol > 0 and self.feas_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_outer_iters < 1 or self.max_inner_iters < 1:
            raise ValueError("iteration limits must be positive")

    @classmethod
    def from_dict(cls, d: dict) -> "OptimizationConfig":
        d = dict(d)
        init = d.pop("init", None)
        if isinstance(init, dict):
            if "nodes" in init:
                d["init_stroke"] = init["nodes"]
            d.setdefault("init_a", init.get("a", cls.init_a))
            d.setdefault("init_b", init.get("b", cls.init_b))
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class OptimizationResult:
    stroke: Stroke
    drag: float
    displacement: float
    length: float
    dual_q: float
    dual_q_predicted: float
    contacts: list[dict]
    el_residual: float | None
    converged: bool
    grad_norm: float
    max_violation: float
    level_drags: list[float]
    trace: list[dict] = field(default_factory=list)
    message: str = ""
    asymmetry: float = math.nan

    def to_dict(self) -> dict:
        return {
            "converged": self.converged,
            "message": self.message,
            "drag": self.drag,
            "displacement": self.displacement,
            "length": self.length,
            "dual_q": self.dual_q,
            "dual_q_predicted": self.dual_q_predicted,
            "el_residual": self.el_residual,
            "grad_norm": self.grad_norm,
            "max_violation": self.max_violation,
            "level_drags": self.level_drags,
            "asymmetry": self.asymmetry,
            "contacts": self.contacts,
            "stroke": self.stroke.to_dict(),
            "trace": self.trace,
        }


def magnetic_field(s: ShapePoint) -> FieldVector:
    """B = ∇ × (A Ŷ) in (W, Y, Z) coordinates."""
    s = _as_shape(s)
    if s.W == 0:
        raise ValueError("field undefined at W = 0")
    return FieldVector((-1 / (SQRT2 * s.W), 0.0, -s.Z / (SQRT2 * s.W**2)))


def _field_array(P: np.ndarray) -> np.ndarray:
    W, Z = P[:, 0], P[:, 2]
    return np.column_stack([-1 / (SQRT2 * W), np.zeros_like(W), -Z / (SQRT2 * W * W)])


def lift(c) -> ShapePoint:
    """Point of the unit-area surface above the chart point (Y, Z)."""
    Y, Z = (c.Y, c.Z) if isinstance(c, ChartPoint) else c
    return ShapePoint(math.sqrt(1 + Y * Y + Z * Z), float(Y), float(Z))


def lift_array(Y: np.ndarray, Z: np.ndarray) -> np.ndarray:
    return np.column_stack([np.sqrt(1 + Y * Y + Z * Z), Y, Z])


def objective(nodes) -> float:
    """Constant-speed drag (|γ|/X)² of the lifted closed stroke."""
    yz = np.asarray([(c.Y, c.Z) if isinstance(c, ChartPoint) else c for c in nodes], float)
    if len(yz) < 32:
        raise ValueError("objective needs at least 32 nodes")
    return _chart_drag(yz[:, 0], yz[:, 1])


def _chart_drag(Y: np.ndarray, Z: np.ndarray) -> float:
    stroke = Stroke(lift_array(Y, Z))
    X = displacement(stroke)
    L = length(stroke)
    if not abs(X) > 1e-14 * L * L:
        raise NonSwimmingStrokeError("non-swimming iterate")
    return (L / X) ** 2


# --- transcription -----------------------------------------------------------

_GT, _GW = gauss_nodes(4)


def _energy_parts(x: np.ndarray):
    """E = n Σ|Δγ|²/X² and its gradient w.r.t. lifted nodes."""
    n = len(x) // 2
    Y, Z = x[:n], x[n:]
    W = np.sqrt(1 + Y * Y + Z * Z)
    P = np.column_stack([W, Y, Z])
    D = np.roll(P, -1, axis=0) - P
    pts = P[:, None, :] + _GT[None, :, None] * D[:, None, :]
    pw, pz = pts[..., 0], pts[..., 2]
    A = pz / (SQRT2 * pw)
    sA = A @ _GW
    X = float(np.sum(D[:, 1] * sA))
    dA = np.stack([-pz / (SQRT2 * pw * pw), np.zeros_like(pw), 1 / (SQRT2 * pw)], axis=-1)
    g_start = D[:, 1, None] * np.einsum("k,nkc->nc", _GW * (1 - _GT), dA)
    g_end = D[:, 1, None] * np.einsum("k,nkc->nc", _GW * _GT, dA)
    g_start[:, 1] -= sA
    g_end[:, 1] += sA
    dX = g_start + np.roll(g_end, 1, axis=0)
    S = float(np.sum(D * D))
    dS = 2 * (np.roll(D, 1, axis=0) - D)
    return n, Y, Z, W, X, dX, S, dS


def _constraint_grads(Y, Z, W):
    one = np.ones_like(W)
    g = np.stack(cone_inequalities(W, Y, Z))
    dW = np.stack([one, one, Y + 2 * W])
    dY = np.stack([-one, -one, W])
    dZ = np.stack([-SQRT2 * one, SQRT2 * one, -4 * Z])
    return g, dW, dY, dZ


def _to_chart(gW, gY, gZ, Y, Z, W):
    return gY + gW * Y / W, gZ + gW * Z / W


def _penalized(x: np.ndarray, rho: float):
    n, Y, Z, W, X, dX, S, dS = _energy_parts(x)
    if X == 0:
        return math.inf, np.zeros_like(x)
    E = n * S / X**2
    gE = n * dS / X**2 - 2 * n * S / X**3 * dX
    g, cW, cY, cZ = _constraint_grads(Y, Z, W)
    v = np.minimum(g, 0.0)
    E += rho * float(np.sum(v * v))
    gE[:, 0] += rho * np.sum(2 * v * cW, axis=0)
    gE[:, 1] += rho * np.sum(2 * v * cY, axis=0)
    gE[:, 2] += rho * np.sum(2 * v * cZ, axis=0)
    gy, gz = _to_chart(gE[:, 0], gE[:, 1], gE[:, 2], Y, Z, W)
    return E, np.concatenate([gy, gz])


def _restore(x: np.ndarray, iters: int = 30) -> np.ndarray:
    """Newton-project violating nodes back onto the cone, node by node."""
    n = len(x) // 2
    Y, Z = x[:n].copy(), x[n:].copy()
    for _ in range(iters):
        W = np.sqrt(1 + Y * Y + Z * Z)
        g, cW, cY, cZ = _constraint_grads(Y, Z, W)
        if np.all(g >= 0):
            break
        k = np.argmin(g, axis=0)
        idx = np.arange(n)
        gk = g[k, idx]
        bad = gk < 0
        gy, gz = _to_chart(cW[k, idx], cY[k, idx], cZ[k, idx], Y, Z, W)
        nrm2 = gy * gy + gz * gz
        # aim slightly inside so rounding cannot leave the node outside
        step = np.where(bad, (-gk + 1e-14) / nrm2, 0.0)
        Y += step * gy
        Z += step * gz
    return np.concatenate([Y, Z])


def _ellipse(cfg: OptimizationConfig, n: int) -> np.ndarray:
    th = 2 * np.pi * np.arange(n) / n
    Y = cfg.init_center + cfg.init_a * np.cos(th)
    Z = cfg.init_b * np.sin(th)
    if cfg.init_jitter > 0:
        rng = np.random.default_rng(cfg.seed)
        Y = Y + cfg.init_jitter * rng.standard_normal(n)
        Z = Z + cfg.init_jitter * rng.standard_normal(n)
    return np.concatenate([Y, Z])


def _resample_closed(yz: np.ndarray, n: int) -> np.ndarray:
    closed = np.vstack([yz, yz[:1]])
    s = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(closed, axis=0), axis=1))])
    t = s[-1] * np.arange(n) / n
    return np.concatenate([np.interp(t, s, closed[:, 0]), np.interp(t, s, closed[:, 1])])


def _initial(cfg: OptimizationConfig, n: int) -> np.ndarray:
    if cfg.init_stroke is None:
        return _ellipse(cfg, n)
    arr = np.asarray(cfg.init_stroke, float)
    if arr.ndim != 2 or arr.shape[1] not in (2, 3) or len(arr) < 3:
        raise ValueError("init stroke must be a list of (Y, Z) or (W, Y, Z) nodes")
    if arr.shape[1] == 3:
        q = arr[:, 0] ** 2 - arr[:, 1] ** 2 - arr[:, 2] ** 2
        if np.any(q <= 0):
            raise ValueError("init stroke has nodes of non-positive area")
        arr = arr[:, 1:] / np.sqrt(q)[:, None]
    return _resample_closed(arr, n)


def _refine(x: np.ndarray) -> np.ndarray:
    n = len(x) // 2
    out = []
    for c in (x[:n], x[n:]):
        mid = 0.5 * (c + np.roll(c, -1))
        out.append(np.column_stack([c, mid]).ravel())
    return np.concatenate(out)


def _solve_level(x: np.ndarray, cfg: OptimizationConfig, level: int, trace: list) -> np.ndarray:
    n = len(x) // 2
    rho = cfg.penalty_init
    for outer in range(cfg.max_outer_iters):
        rows: list[float] = []

        def record(xk, _rows=rows, _rho=rho):
            _rows.append(_penalized(xk, _rho)[0])

        res = minimize(
            _penalized,
            x,
            args=(rho,),
            jac=True,
            method="L-BFGS-B",
            callback=record,
            options={"maxiter": cfg.max_inner_iters, "maxcor": 30, "ftol": 1e-16, "gtol": 1e-11},
        )
        x = res.x
        for it, val in enumerate(rows):
            trace.append({"level": level, "n_nodes": n, "outer": outer, "penalty": rho, "iteration": it, "objective": val})
        Y, Z = x[:n], x[n:]
        viol = -min(0.0, float(np.min(np.stack(cone_inequalities(np.sqrt(1 + Y * Y + Z * Z), Y, Z)))))
        log.debug("level %d outer %d rho %.1e: E=%.10f viol=%.2e nit=%d", level, outer, rho, res.fun, viol, res.nit)
        if viol <= 0.1 * cfg.feas_tol:
            break
        rho *= cfg.penalty_growth
    return x


def _kkt_gradient(x: np.ndarray, act_tol: float) -> float:
    """Objective gradient with nonnegative multipliers of active constraints removed.

    Returned as a max-norm relative to E / (mean node spacing), the natural
    size of a per-node gradient.
    """
    n, Y, Z, W, X, dX, S, dS = _energy_parts(x)
    E = n * S / X**2
    gE = n * dS / X**2 - 2 * n * S / X**3 * dX
    gy, gz = _to_chart(gE[:, 0], gE[:, 1], gE[:, 2], Y, Z, W)
    grad = np.column_stack([gy, gz])
    g, cW, cY, cZ = _constraint_grads(Y, Z, W)
    for i in range(n):
        act = np.nonzero(g[:, i] <= act_tol)[0]
        if act.size == 0:
            continue
        cy, cz = _to_chart(cW[act, i], cY[act, i], cZ[act, i], Y[i], Z[i], W[i])
        Jt = np.column_stack([cy, cz])  # rows: constraint gradients
        lam, *_ = np.linalg.lstsq(Jt.T, grad[i], rcond=None)
        lam = np.maximum(lam, 0.0)
        grad[i] = grad[i] - Jt.T @ lam
    h = math.sqrt(S / n)
    return float(np.max(np.linalg.norm(grad, axis=1)) * h / E)


def _canonical(stroke: Stroke) -> Stroke:
    if displacement(stroke) < 0:
        stroke = stroke.reversed()
    return stroke.rotated(int(np.argmax(stroke.nodes[:, 0])))


def mirror_asymmetry(stroke: Stroke) -> float:
    """Largest distance from a Z-mirrored node to the nearest node of the stroke."""
    P = stroke.nodes
    M = P * np.array([1.0, 1.0, -1.0])
    d = np.linalg.norm(M[:, None, :] - P[None, :, :], axis=2)
    return float(d.min(axis=1).max())


def _gap(P: np.ndarray, k: int) -> np.ndarray:
    """First-order distance (inside the unit-area surface) to constraint k."""
    W, Y, Z = P.T
    g, cW, cY, cZ = _constraint_grads(Y, Z, W)
    grad = np.column_stack([cW[k], cY[k], cZ[k]])
    normal = np.column_stack([W, -Y, -Z])
    normal /= np.linalg.norm(normal, axis=1)[:, None]
    gt = grad - np.sum(grad * normal, axis=1)[:, None] * normal
    return g[k] / np.linalg.norm(gt, axis=1)


def _fitted_contact_angle(P: np.ndarray, k: int, end: int, step: int) -> float:
    """Angle at which the free arc meets constraint k next to arc node ``end``.

    Fits a parabola to the gap of the three free nodes preceding the arc
    (walking in direction ``-step``) as a function of arclength and returns the
    slope angle where it reaches zero; a parabola that stays positive touches
    tangentially and gives 0. Unlike a finite-difference tangent at the arc
    node, this is not polluted by the curvature jump at the junction.
    """
    n = len(P)
    idx = [(end - step * j) % n for j in range(4)]  # arc node, then three free nodes
    pts = P[idx]
    sigma = -np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(pts, axis=0), axis=1))])
    d = _gap(pts[1:], k)
    c2, c1, c0 = np.polyfit(sigma[1:], d, 2)
    disc = c1 * c1 - 4 * c2 * c0
    if disc < 0 or c2 == 0:
        return 0.0
    roots = np.array([(-c1 + math.sqrt(disc)) / (2 * c2), (-c1 - math.sqrt(disc)) / (2 * c2)])
    root = roots[np.argmin(np.abs(roots - 0.5 * sigma[1]))]
    return float(math.atan(abs(2 * c2 * root + c1)))


def contact_arcs(stroke: Stroke, tol: float) -> list[dict]:
    """Maximal cyclic runs of nodes where one cone inequality is active.

    Each arc reports the angle between stroke and constraint curve (inside
    the unit-area surface) on entry and exit, from a one-sided fit of the
    approach (``entry_angle``/``exit_angle``) and from the central-difference
    tangent at the end nodes (``*_angle_fd``), which carries an O(h) error.
    """
    P = stroke.nodes
    n = len(P)
    W, Y, Z = P.T
    g, cW, cY, cZ = _constraint_grads(Y, Z, W)
    tangent = np.roll(P, -1, axis=0) - np.roll(P, 1, axis=0)
    arcs = []
    for k, name in enumerate(CONSTRAINT_NAMES):
        active = g[k] <= tol
        if not active.any():
            continue
        if active.all():
            arcs.append({"constraint": name, "start": 0, "end": n - 1, "nodes": n,
                         "entry_angle": 0.0, "exit_angle": 0.0, "entry_angle_fd": 0.0, "exit_angle_fd": 0.0})
            continue
        for s in np.nonzero(active & ~np.roll(active, 1))[0]:
            e = s
            while active[(e + 1) % n]:
                e += 1
            fd = []
            for i in (s % n, e % n):
                grad = np.array([cW[k, i], cY[k, i], cZ[k, i]])
                normal = np.array([W[i], -Y[i], -Z[i]])
                normal /= np.linalg.norm(normal)
                gt = grad - (grad @ normal) * normal
                t = tangent[i] - (tangent[i] @ normal) * normal
                c = abs(gt @ t) / (np.linalg.norm(gt) * np.linalg.norm(t))
                fd.append(float(math.asin(min(1.0, c))))
            arcs.append(
                {
                    "constraint": name,
                    "start": int(s),
                    "end": int(e % n),
                    "nodes": int(e - s + 1),
                    "entry_angle": _fitted_contact_angle(P, k, int(s), 1),
                    "exit_angle": _fitted_contact_angle(P, k, int(e % n), -1),
                    "entry_angle_fd": fd[0],
                    "exit_angle_fd": fd[1],
                }
            )
    arcs.sort(key=lambda a: a["start"])
    return arcs


def classify_contacts(res: OptimizationResult, feas_tol: float | None = None) -> list[dict]:
    tol = feas_tol if feas_tol is not None else 1e-8
    return contact_arcs(res.stroke, tol)


def el_fit(stroke: Stroke, exclude: list[dict] | None = None, mu: float = 1.0, buffer: int = 3) -> tuple[float, float]:
    """Best-fit charge q and the residual of 8πμ γ̈ = q γ̇ × B on free arcs.

    The stroke is timed at constant speed with period 1; derivatives are
    three-point finite differences in time. Only the part tangent to the
    unit-area surface is compared, since the area constraint supplies the
    normal force. Nodes within ``buffer`` of a contact arc are skipped. The
    residual is the max over free nodes of |8πμ γ̈ - q γ̇ × B| / (8πμ |γ̇|²).
    """
    timed = reparameterize_constant_speed(stroke, 1.0)
    P = timed.nodes
    n = len(P)
    dt = timed.durations()
    hm = np.roll(dt, 1)  # time from previous node
    hp = dt  # time to next node
    prev, nxt = np.roll(P, 1, axis=0), np.roll(P, -1, axis=0)
    vel = (nxt - prev) / (hm + hp)[:, None]
    acc = 2 * ((nxt - P) / hp[:, None] - (P - prev) / hm[:, None]) / (hm + hp)[:, None]
    free = np.ones(n, dtype=bool)
    for arc in exclude or []:
        s, e = arc["start"], arc["start"] + arc["nodes"] - 1
        for i in range(s - buffer, e + buffer + 1):
            free[i % n] = False
    if free.sum() < 8:
        raise ValueError("insufficient interior arc")
    normal = np.column_stack([P[:, 0], -P[:, 1], -P[:, 2]])
    normal /= np.linalg.norm(normal, axis=1)[:, None]

    def tangential(v):
        return v - np.sum(v * normal, axis=1)[:, None] * normal

    m = 8 * math.pi * mu
    a = tangential(m * acc)[free]
    b = tangential(np.cross(vel, _field_array(P)))[free]
    q = float(np.sum(a * b) / np.sum(b * b))
    resid = np.linalg.norm(a - q * b, axis=1) / (m * np.sum(vel[free] ** 2, axis=1))
    return q, float(resid.max())


def el_residual(res: OptimizationResult, mu: float = 1.0) -> float:
    return el_fit(res.stroke, res.contacts, mu)[1]


def optimize(cfg: OptimizationConfig | None = None) -> OptimizationResult:
    cfg = cfg or OptimizationConfig()
    n0 = cfg.n_nodes // 2 ** (cfg.refine_levels - 1)
    x = _initial(cfg, n0)
    trace: list[dict] = []
    level_drags = []
    for level in range(cfg.refine_levels):
        if level:
            x = _refine(x)
        x = _solve_level(x, cfg, level, trace)
        x = _restore(x)
        n = len(x) // 2
        try:
            level_drags.append(_chart_drag(x[:n], x[n:]))
        except NonSwimmingStrokeError as exc:
            raise OptimizationError("optimizer collapsed to a non-swimming stroke") from exc

    n = len(x) // 2
    stroke = _canonical(Stroke(lift_array(x[:n], x[n:])))
    W, Y, Z = stroke.nodes.T
    max_violation = -min(0.0, float(np.min(np.stack(cone_inequalities(W, Y, Z)))))
    xc = np.concatenate([Y, Z])
    grad_norm = _kkt_gradient(xc, act_tol=max(cfg.feas_tol, 1e-12))
    L, X = length(stroke), displacement(stroke)
    contacts = contact_arcs(stroke, cfg.feas_tol)
    try:
        q, resid = el_fit(stroke, contacts, cfg.mu)
    except ValueError:
        q, resid = math.nan, None
    converged = grad_norm <= cfg.grad_tol and max_violation <= cfg.feas_tol
    message = "converged" if converged else (
        f"not converged: scaled projected gradient {grad_norm:.3e} (tol {cfg.grad_tol:.1e}), "
        f"violation {max_violation:.3e} (tol {cfg.feas_tol:.1e})"
    )
    return OptimizationResult(
        stroke=stroke,
        drag=(L / X) ** 2,
        displacement=X,
        length=L,
        dual_q=q,
        dual_q_predicted=-8 * math.pi * cfg.mu * L * L / X,
        contacts=contacts,
        el_residual=resid,
        converged=converged,
        grad_norm=grad_norm,
        max_violation=max_violation,
        level_drags=level_drags,
        trace=trace,
        message=message,
        asymmetry=mirror_asymmetry(stroke),
    )
