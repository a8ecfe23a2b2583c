"""Shapes of the swimmer: the Riemann map, areas and the physical cone.

A shape is a real triple (W, Y, Z); the boundary curve is the image of the
unit circle under

    z(ζ) = W ζ + X + Y/ζ + Z/(√2 ζ²).

The curve is simple exactly when z' has no zero on or outside the unit
circle.  For W > 0 this is the cone

    g1 = W - Y - √2 Z ≥ 0,   g2 = W - Y + √2 Z ≥ 0,   g3 = W Y + W² - 2 Z² ≥ 0.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

SQRT2 = math.sqrt(2.0)

ConeTag = Literal["interior", "boundary", "outside"]


class NonPhysicalShapeError(ValueError):
    """Raised when a shape is outside the physical cone or otherwise unusable."""


@dataclass(frozen=True)
class ShapePoint:
    W: float
    Y: float
    Z: float

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.W, self.Y, self.Z)):
            raise ValueError(f"shape components must be finite, got {self!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.W, self.Y, self.Z], dtype=float)

    @classmethod
    def from_array(cls, a) -> "ShapePoint":
        return cls(float(a[0]), float(a[1]), float(a[2]))

    def scaled(self, lam: float) -> "ShapePoint":
        return ShapePoint(lam * self.W, lam * self.Y, lam * self.Z)


@dataclass(frozen=True)
class LocatedShape:
    shape: ShapePoint
    X: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.X):
            raise ValueError("position X must be finite")


@dataclass(frozen=True)
class ConeStatus:
    tag: ConeTag
    cusp_angles: tuple[float, ...] = field(default_factory=tuple)
    g: tuple[float, float, float] = (math.nan, math.nan, math.nan)

    @property
    def physical(self) -> bool:
        return self.tag != "outside"


@dataclass(frozen=True)
class BoundaryPolyline:
    points: np.ndarray  # complex, shape (n,)
    closed: bool = True


def _as_shape(s) -> ShapePoint:
    if isinstance(s, LocatedShape):
        return s.shape
    if isinstance(s, ShapePoint):
        return s
    return ShapePoint.from_array(s)


def boundary_point(s: LocatedShape, theta):
    """z(e^{iθ}) for a located shape; vectorized over ``theta``."""
    if isinstance(s, ShapePoint):
        s = LocatedShape(s)
    sh = s.shape
    zeta = np.exp(1j * np.asarray(theta, dtype=float))
    z = sh.W * zeta + s.X + sh.Y / zeta + sh.Z / (SQRT2 * zeta**2)
    return complex(z) if z.ndim == 0 else z


def map_value(s: ShapePoint, zeta, X: float = 0.0):
    """z(ζ) at arbitrary complex ζ (ζ ≠ 0)."""
    return s.W * zeta + X + s.Y / zeta + s.Z / (SQRT2 * zeta**2)


def map_derivative(s: ShapePoint, zeta):
    """z'(ζ) = W - Y/ζ² - √2 Z/ζ³."""
    return s.W - s.Y / zeta**2 - SQRT2 * s.Z / zeta**3


def map_second_derivative(s: ShapePoint, zeta):
    return 2 * s.Y / zeta**3 + 3 * SQRT2 * s.Z / zeta**4


def boundary_derivative(s: ShapePoint, theta):
    """z'(ζ) on the unit circle, ζ = e^{iθ}."""
    s = _as_shape(s)
    zp = map_derivative(s, np.exp(1j * np.asarray(theta, dtype=float)))
    return complex(zp) if np.ndim(zp) == 0 else zp


def area(s: ShapePoint) -> float:
    """Enclosed area π (W² - Y² - Z²); not clipped for non-physical points."""
    s = _as_shape(s)
    return math.pi * (s.W**2 - s.Y**2 - s.Z**2)


def cone_inequalities(W, Y, Z):
    """Raw (g1, g2, g3); works elementwise on arrays."""
    W, Y, Z = np.asarray(W, float), np.asarray(Y, float), np.asarray(Z, float)
    return (W - Y - SQRT2 * Z, W - Y + SQRT2 * Z, W * Y + W * W - 2 * Z * Z)


def cone_margins(W, Y, Z):
    """Degree-zero versions (g1/W, g2/W, g3/W²) used for classification.

    These make the classification invariant under positive rescaling of the
    shape. Entries with W ≤ 0 are set to -inf.
    """
    W = np.asarray(W, float)
    g1, g2, g3 = cone_inequalities(W, Y, Z)
    with np.errstate(divide="ignore", invalid="ignore"):
        m = np.stack([g1 / W, g2 / W, g3 / (W * W)])
    return np.where(W > 0, m, -np.inf)


def classify_array(W, Y, Z, tol: float = 1e-9) -> np.ndarray:
    """Vectorized cone tags: +1 interior, 0 boundary, -1 outside."""
    m = cone_margins(W, Y, Z)
    out = np.zeros(m.shape[1:], dtype=int)
    out[(m > tol).all(axis=0)] = 1
    out[(m < -tol).any(axis=0)] = -1
    return out


def _cbrt(c: complex) -> complex:
    if c == 0:
        return 0j
    return cmath.exp(cmath.log(c) / 3)


def critical_points(s: ShapePoint) -> list[complex]:
    """Roots of W ζ³ - Y ζ - √2 Z = 0, i.e. the zeros of z', with multiplicity.

    Cardano's formula on the depressed cubic followed by one Newton step
    per root.
    """
    s = _as_shape(s)
    if s.W == 0:
        raise ValueError("critical points undefined for W = 0")
    p = -s.Y / s.W
    q = -SQRT2 * s.Z / s.W
    # t³ + p t + q = 0
    disc = cmath.sqrt(q * q / 4 + p**3 / 27)
    a, b = -q / 2 + disc, -q / 2 - disc
    u = _cbrt(a if abs(a) >= abs(b) else b)
    omega = complex(-0.5, math.sqrt(3) / 2)
    roots = []
    for k in range(3):
        uk = u * omega**k
        roots.append(0j if uk == 0 else uk - p / (3 * uk))
    polished = []
    for r in roots:
        d = 3 * r * r + p
        if d != 0:
            r = r - (r**3 + p * r + q) / d
        polished.append(complex(r))
    return polished


def cone_classify(s: ShapePoint, tol: float = 1e-9) -> ConeStatus:
    """Interior / boundary / outside of the physical cone.

    Interior if every normalized inequality exceeds ``tol``, outside if any is
    below ``-tol``; otherwise boundary, with the angles of the critical points
    lying on the unit circle.
    """
    s = _as_shape(s)
    if tol <= 0:
        raise ValueError("tol must be positive")
    g = tuple(float(x) for x in cone_inequalities(s.W, s.Y, s.Z))
    if s.W <= 0:
        return ConeStatus("outside", (), g)
    m = cone_margins(s.W, s.Y, s.Z)
    if (m > tol).all():
        return ConeStatus("interior", (), g)
    if (m < -tol).any():
        return ConeStatus("outside", (), g)
    roots = critical_points(s)
    dev = [abs(abs(r) - 1.0) for r in roots]
    # a simple root moves by O(tol); coalescing roots near cone edges by O(√tol)
    band = max(10 * tol, math.sqrt(tol))
    on_circle = [r for r, d in zip(roots, dev) if d <= band]
    if not on_circle:
        on_circle = [roots[int(np.argmin(dev))]]
    angles = sorted({round(cmath.phase(r) % (2 * math.pi), 12) % (2 * math.pi) for r in on_circle})
    return ConeStatus("boundary", tuple(angles), g)


def sample_boundary(s: LocatedShape, n: int) -> BoundaryPolyline:
    """n boundary points at θ = 2πk/n, counterclockwise from θ = 0."""
    if n < 3:
        raise ValueError("need at least 3 samples")
    theta = 2 * np.pi * np.arange(n) / n
    return BoundaryPolyline(np.atleast_1d(boundary_point(s, theta)))


def _segments_cross(p: np.ndarray) -> bool:
    """Proper crossing between any two non-adjacent edges of a closed polygon."""
    n = len(p)
    a = p
    b = np.roll(p, -1)
    x0 = np.minimum(a.real, b.real)
    x1 = np.maximum(a.real, b.real)
    y0 = np.minimum(a.imag, b.imag)
    y1 = np.maximum(a.imag, b.imag)
    idx = np.arange(n)

    def cross(u, v):
        return u.real * v.imag - u.imag * v.real

    block = 256
    for start in range(0, n, block):
        i = idx[start : start + block, None]
        j = idx[None, :]
        keep = (j >= i + 2) & ~((i == 0) & (j == n - 1))
        keep &= (x0[i] <= x1[j]) & (x0[j] <= x1[i]) & (y0[i] <= y1[j]) & (y0[j] <= y1[i])
        ii, jj = np.nonzero(keep)
        if ii.size == 0:
            continue
        ii = ii + start
        p1, p2, p3, p4 = a[ii], b[ii], a[jj], b[jj]
        d1 = cross(p4 - p3, p1 - p3)
        d2 = cross(p4 - p3, p2 - p3)
        d3 = cross(p2 - p1, p3 - p1)
        d4 = cross(p2 - p1, p4 - p1)
        if np.any((d1 * d2 < 0) & (d3 * d4 < 0)):
            return True
    return False


def self_intersects(s: ShapePoint, n: int = 1024) -> bool:
    """Sampled-polygon test for boundary self-intersection."""
    if n < 16:
        raise ValueError("n must be at least 16")
    return _segments_cross(sample_boundary(LocatedShape(_as_shape(s)), n).points)


def project_to_unit_area(s: ShapePoint) -> ShapePoint:
    """Rescale so that the enclosed area is π."""
    s = _as_shape(s)
    q = s.W**2 - s.Y**2 - s.Z**2
    if not q > 0:
        raise NonPhysicalShapeError(f"cannot normalize area of {s}: W² - Y² - Z² = {q}")
    return s.scaled(1.0 / math.sqrt(q))
