"""Exact Stokes flow around the swimmer.

The flow is written with two holomorphic functions of the exterior variable ζ,

    v = f1(ζ) + conj(f2(ζ)) - z(ζ) conj(f1'(ζ) / z'(ζ)),
    f1 = Ẏ/ζ + Ż/(√2 ζ²),
    f2 = Ẋ + Ẇ/ζ + z(1/ζ) f1'(ζ) / z'(ζ),

with z(1/ζ) = W/ζ + Yζ + Zζ²/√2 the reflected map (real parameters). The
form of f2 makes v = ż on |ζ| = 1 manifest. The flow decays at infinity only
when Ẋ = A Ẏ with A = Z / (√2 W). All evaluations are in the body frame
(X = 0); translation drops out of every observable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from swim.geometry import (
    SQRT2,
    ShapePoint,
    _as_shape,
    cone_classify,
    map_derivative,
    map_second_derivative,
    map_value,
)


@dataclass(frozen=True)
class Fluid:
    mu: float = 1.0

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError("viscosity must be positive")


@dataclass(frozen=True)
class DeformationRate:
    dW: float
    dY: float
    dZ: float
    dX: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.dW, self.dY, self.dZ, self.dX])


@dataclass(frozen=True)
class FlowSample:
    v: complex
    p: float


class FlowDomainError(ValueError):
    """Evaluation point outside the fluid or at a singular point of the map."""


def connection_A(s: ShapePoint) -> float:
    """A = Z / (√2 W): swimming response per unit change of Y."""
    s = _as_shape(s)
    if s.W == 0:
        raise ValueError("connection undefined at W = 0")
    return s.Z / (SQRT2 * s.W)


def with_connection(s: ShapePoint, dW: float, dY: float, dZ: float) -> DeformationRate:
    return DeformationRate(dW, dY, dZ, connection_A(s) * dY)


def _check_fluid(zeta):
    if np.any(np.abs(zeta) < 1 - 1e-12):
        raise FlowDomainError("ζ must satisfy |ζ| ≥ 1 (fluid region)")


def _check_regular(zp):
    if np.any(zp == 0):
        raise FlowDomainError("z'(ζ) = 0: map is singular at this point")


def f1_value(r: DeformationRate, zeta):
    zeta = np.asarray(zeta, dtype=complex)
    _check_fluid(zeta)
    return _scalar(r.dY / zeta + r.dZ / (SQRT2 * zeta**2))


def f1_derivative(r: DeformationRate, zeta):
    return -r.dY / zeta**2 - SQRT2 * r.dZ / zeta**3


def f1_second_derivative(r: DeformationRate, zeta):
    return 2 * r.dY / zeta**3 + 3 * SQRT2 * r.dZ / zeta**4


def _reflected_map(s: ShapePoint, zeta):
    return s.W / zeta + s.Y * zeta + s.Z * zeta**2 / SQRT2


def _reflected_map_derivative(s: ShapePoint, zeta):
    return -s.W / zeta**2 + s.Y + SQRT2 * s.Z * zeta


def _f2(s, r, zeta, zp):
    return r.dX + r.dW / zeta + _reflected_map(s, zeta) * f1_derivative(r, zeta) / zp


def _scalar(a):
    return a.item() if np.ndim(a) == 0 else a


def f2_value(s: ShapePoint, r: DeformationRate, zeta):
    s = _as_shape(s)
    zeta = np.asarray(zeta, dtype=complex)
    _check_fluid(zeta)
    zp = map_derivative(s, zeta)
    _check_regular(zp)
    return _scalar(_f2(s, r, zeta, zp))


def velocity(s: ShapePoint, r: DeformationRate, zeta):
    """Fluid velocity v_x + i v_y at the image of ζ (vectorized in ζ)."""
    s = _as_shape(s)
    zeta = np.asarray(zeta, dtype=complex)
    _check_fluid(zeta)
    zp = map_derivative(s, zeta)
    _check_regular(zp)
    f1 = r.dY / zeta + r.dZ / (SQRT2 * zeta**2)
    f1p = f1_derivative(r, zeta)
    v = f1 + np.conj(_f2(s, r, zeta, zp)) - map_value(s, zeta) * np.conj(f1p / zp)
    return _scalar(v)


def pressure(s: ShapePoint, r: DeformationRate, mu: float, zeta):
    """p = -4μ Re(f1'(ζ) / z'(ζ))."""
    s = _as_shape(s)
    zeta = np.asarray(zeta, dtype=complex)
    _check_fluid(zeta)
    zp = map_derivative(s, zeta)
    _check_regular(zp)
    return _scalar(-4 * mu * np.real(f1_derivative(r, zeta) / zp))


def flow_sample(s: ShapePoint, r: DeformationRate, mu: float, zeta) -> FlowSample:
    return FlowSample(complex(velocity(s, r, zeta)), float(pressure(s, r, mu, zeta)))


def boundary_velocity(s: ShapePoint, r: DeformationRate, zeta):
    """Material velocity ż of the boundary point labelled ζ."""
    return r.dW * zeta + r.dX + r.dY / zeta + r.dZ / (SQRT2 * zeta**2)


def power_closed_form(r: DeformationRate, mu: float = 1.0) -> float:
    """P = 4πμ (Ẇ² + Ẏ² + Ż²)."""
    if not mu > 0:
        raise ValueError("viscosity must be positive")
    return 4 * math.pi * mu * (r.dW**2 + r.dY**2 + r.dZ**2)


def power_contour(s: ShapePoint, r: DeformationRate, mu: float = 1.0, n: int = 512) -> float:
    """Dissipated power as the boundary integral of traction times velocity.

    P = Im ∮ conj(v) (2μ ∂v/∂z̄ dz̄ + p dz), trapezoidal rule in θ. The
    traction on a boundary element is i(2μ ∂v/∂z̄ dz̄ + p dz) for a
    counterclockwise contour.
    """
    s = _as_shape(s)
    if n < 64:
        raise ValueError("quadrature order must be at least 64")
    if not mu > 0:
        raise ValueError("viscosity must be positive")
    if cone_classify(s, 1e-9).tag != "interior":
        raise FlowDomainError("power contour integral needs a shape strictly inside the cone")
    if s.W != 0 and abs(r.dX - connection_A(s) * r.dY) > 1e-12 * max(1.0, abs(r.dX)):
        raise ValueError("rate is inconsistent with the connection; flow would not decay")

    theta = 2 * np.pi * np.arange(n) / n
    zeta = np.exp(1j * theta)
    z = map_value(s, zeta)
    zp = map_derivative(s, zeta)
    zpp = map_second_derivative(s, zeta)
    f1 = r.dY / zeta + r.dZ / (SQRT2 * zeta**2)
    f1p = f1_derivative(r, zeta)
    f1pp = f1_second_derivative(r, zeta)
    refl = _reflected_map(s, zeta)
    f2 = r.dX + r.dW / zeta + refl * f1p / zp
    f2p = (
        -r.dW / zeta**2
        + (_reflected_map_derivative(s, zeta) * f1p + refl * f1pp) / zp
        - refl * f1p * zpp / zp**2
    )
    v = f1 + np.conj(f2) - z * np.conj(f1p / zp)
    phi_pp = (f1pp * zp - f1p * zpp) / zp**3
    dv_dzbar = np.conj(f2p / zp) - z * np.conj(phi_pp)
    p = -4 * mu * np.real(f1p / zp)
    dz = zp * 1j * zeta * (2 * np.pi / n)
    integrand = np.conj(v) * (2 * mu * dv_dzbar * np.conj(dz) + p * dz)
    return float(np.imag(np.sum(integrand)))


def _invert_map(s: ShapePoint, target, seed, dtype, iters: int = 50):
    zeta = seed
    sq = np.sqrt(dtype(2))
    W, Y, Z = dtype(s.W), dtype(s.Y), dtype(s.Z)
    for _ in range(iters):
        zp = W - Y / zeta**2 - sq * Z / zeta**3
        step = (W * zeta + Y / zeta + Z / (sq * zeta**2) - target) / zp
        zeta = zeta - step
        if abs(step) <= 1024 * np.finfo(dtype).eps * abs(zeta):
            return zeta
    raise FlowDomainError("Newton inversion of the map did not converge in 50 iterations")


def stokes_residual(
    s: ShapePoint,
    r: DeformationRate,
    mu: float,
    z0: complex,
    h: float,
    zeta_guess: complex | None = None,
) -> tuple[float, float]:
    """Finite-difference check that (v, p) solves the Stokes equations at z0.

    Builds a five-point stencil of spacing h around z0 in the physical plane,
    maps each node back to ζ by Newton iteration and returns
    (|∇·v|, |μΔv - ∇p|), each divided by max(|v(z0)|, 1).

    Stencil values are evaluated in extended precision so that the O(h²)
    truncation error stays visible down to h = 1e-4.
    """
    s = _as_shape(s)
    if not h > 0:
        raise ValueError("h must be positive")
    cd = np.clongdouble
    ld = np.longdouble
    sq = np.sqrt(ld(2))
    W, Y, Z = ld(s.W), ld(s.Y), ld(s.Z)
    dW, dY, dZ, dX = ld(r.dW), ld(r.dY), ld(r.dZ), ld(r.dX)
    z0 = cd(z0)
    seed = cd(zeta_guess) if zeta_guess is not None else z0 / W
    zeta0 = _invert_map(s, z0, seed, ld)
    if abs(zeta0) <= 1 + 4 * h / s.W:
        raise FlowDomainError("stencil is not strictly inside the fluid")

    def vp(q):
        zp = W - Y / q**2 - sq * Z / q**3
        f1 = dY / q + dZ / (sq * q * q)
        f1p = -dY / q**2 - sq * dZ / q**3
        refl = W / q + Y * q + Z * q * q / sq
        f2 = dX + dW / q + refl * f1p / zp
        z = W * q + Y / q + Z / (sq * q * q)
        v = f1 + np.conj(f2) - z * np.conj(f1p / zp)
        return v, -4 * ld(mu) * np.real(f1p / zp)

    hh = ld(h)
    offsets = [cd(0), cd(hh), cd(-hh), cd(1j) * hh, cd(-1j) * hh]
    vs, ps = [], []
    for off in offsets:
        q = zeta0 if off == 0 else _invert_map(s, z0 + off, zeta0, ld)
        v, p = vp(q)
        vs.append(v)
        ps.append(p)
    div = ((vs[1] - vs[2]).real + (vs[3] - vs[4]).imag) / (2 * hh)
    lap = (vs[1] + vs[2] + vs[3] + vs[4] - 4 * vs[0]) / hh**2
    grad_p = (ps[1] - ps[2]) / (2 * hh) + cd(1j) * (ps[3] - ps[4]) / (2 * hh)
    scale = max(float(abs(vs[0])), 1.0)
    return float(abs(div)) / scale, float(abs(ld(mu) * lap - grad_p)) / scale
