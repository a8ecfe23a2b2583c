import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_interior_shapes
from swim.flow import (
    DeformationRate,
    FlowDomainError,
    Fluid,
    boundary_velocity,
    connection_A,
    f1_value,
    f2_value,
    flow_sample,
    power_closed_form,
    power_contour,
    pressure,
    stokes_residual,
    velocity,
    with_connection,
)
from swim.geometry import SQRT2, ShapePoint, map_value

S = ShapePoint(1.5, 0.3, 0.2)
R = with_connection(S, 0.1, -0.2, 0.3)
REST = DeformationRate(0, 0, 0, 0)

rates = st.floats(-2, 2, allow_nan=False)


class TestFluid:
    def test_rejects_nonpositive_viscosity(self):
        with pytest.raises(ValueError):
            Fluid(0.0)
        assert Fluid(2.0).mu == 2.0


class TestConnection:
    def test_zero_for_flat(self):
        assert connection_A(ShapePoint(1, 0.7, 0)) == 0

    def test_substitution(self):
        assert connection_A(ShapePoint(2, 0, SQRT2)) == pytest.approx(0.5)

    def test_degree_zero(self):
        assert connection_A(ShapePoint(6, 0, 3 * SQRT2)) == pytest.approx(0.5)

    def test_rejects_zero_W(self):
        with pytest.raises(ValueError):
            connection_A(ShapePoint(0, 1, 1))
        with pytest.raises(ValueError):
            with_connection(ShapePoint(0, 1, 1), 0, 1, 0)

    @pytest.mark.parametrize(
        "s,r,dX", [((1, 0, 0), (0, 1, 0), 0.0), ((2, 0, SQRT2), (0, 2, 0), 1.0), ((2, 0, SQRT2), (1, 0, 1), 0.0)]
    )
    def test_with_connection(self, s, r, dX):
        assert with_connection(ShapePoint(*s), *r).dX == pytest.approx(dX)


class TestPotentials:
    def test_f1_examples(self):
        assert f1_value(DeformationRate(0, 1, 0), 2) == pytest.approx(0.5)
        assert f1_value(DeformationRate(0, 0, SQRT2), 1j) == pytest.approx(-1)
        assert abs(f1_value(DeformationRate(1, 1, 1), 1e9)) < 1e-8

    def test_f1_rejects_inside_disc(self):
        with pytest.raises(FlowDomainError):
            f1_value(R, 0.5)

    def test_f2_pure_translation(self):
        assert f2_value(S, DeformationRate(0, 0, 0, 0.7), 1.3 + 0.4j) == pytest.approx(0.7)

    def test_f2_breathing(self):
        assert f2_value(ShapePoint(1, 0, 0), DeformationRate(1, 0, 0, 0), 2) == pytest.approx(0.5)

    def test_f2_decays_with_connection(self):
        assert abs(f2_value(S, R, 1e7 * np.exp(1j))) < 1e-6

    def test_f2_rejects_singular_map(self):
        # ζ = 1 is a critical point of this cusped map
        with pytest.raises(FlowDomainError):
            f2_value(ShapePoint(1, 0.2, 0.8 / SQRT2), R, 1.0)


class TestVelocity:
    def test_rest(self):
        assert velocity(S, REST, 1.7 + 0.2j) == 0

    def test_no_slip_example(self):
        zeta = np.exp(1j * math.pi / 3)
        assert abs(velocity(S, R, zeta) - boundary_velocity(S, R, zeta)) < 1e-10

    def test_decay(self):
        assert abs(velocity(S, R, 1e6 * np.exp(1j))) <= 1e-5

    def test_vectorized(self):
        zeta = np.array([1.0, 2j, -3.0 + 1j])
        np.testing.assert_allclose(velocity(S, R, zeta), [velocity(S, R, z) for z in zeta])

    def test_without_connection_does_not_decay(self):
        r = DeformationRate(R.dW, R.dY, R.dZ, R.dX + 0.5)
        assert abs(velocity(S, r, 1e8)) > 0.4

    @settings(max_examples=100, deadline=None)
    @given(rates, rates, rates, st.floats(0, 2 * math.pi), st.integers(0, 10_000))
    def test_no_slip_identity(self, dW, dY, dZ, theta, seed):
        s = random_interior_shapes(np.random.default_rng(seed), 1)[0]
        r = with_connection(s, dW, dY, dZ)
        zeta = np.exp(1j * theta)
        zdot = boundary_velocity(s, r, zeta)
        assert abs(velocity(s, r, zeta) - zdot) <= 1e-10 * max(abs(zdot), 1)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(rates, min_size=8, max_size=8), st.floats(1, 4), st.floats(0, 2 * math.pi))
    def test_linear_in_rates(self, c, rad, theta):
        a, b = DeformationRate(*c[:4]), DeformationRate(*c[4:])
        ab = DeformationRate(*(np.array(c[:4]) + 2 * np.array(c[4:])))
        zeta = rad * np.exp(1j * theta)
        lhs = velocity(S, ab, zeta)
        rhs = velocity(S, a, zeta) + 2 * velocity(S, b, zeta)
        assert abs(lhs - rhs) <= 1e-12 * (1 + abs(lhs))


class TestPressure:
    def test_rest(self):
        assert pressure(S, REST, 1.0, 2.0) == 0

    def test_substitution(self):
        assert pressure(ShapePoint(1, 0, 0), DeformationRate(0, 1, 0, 0), 1.0, 1.0) == pytest.approx(4)
        assert pressure(ShapePoint(1, 0, 0), DeformationRate(0, 1, 0, 0), 2.5, 1.0) == pytest.approx(10)

    def test_decay(self):
        assert abs(pressure(S, R, 1.0, 1e6)) < 1e-10

    def test_flow_sample(self):
        fs = flow_sample(S, R, 1.0, 2.0 + 1j)
        assert fs.v == velocity(S, R, 2.0 + 1j) and fs.p == pressure(S, R, 1.0, 2.0 + 1j)


class TestPower:
    def test_closed_form_examples(self):
        assert power_closed_form(DeformationRate(0, 0, 0, 5)) == 0
        assert power_closed_form(DeformationRate(1, 2, 2), 1.0) == pytest.approx(36 * math.pi)
        assert power_closed_form(DeformationRate(1, 0, 0), 2.0) == pytest.approx(8 * math.pi)

    def test_closed_form_ignores_dX(self):
        assert power_closed_form(DeformationRate(1, 2, 3, 0)) == power_closed_form(DeformationRate(1, 2, 3, 9))

    def test_contour_rest(self):
        assert power_contour(S, REST, 1.0, 512) == pytest.approx(0, abs=1e-15)

    def test_contour_example(self):
        assert power_contour(S, R, 1.0, 512) == pytest.approx(0.56 * math.pi, rel=1e-6)

    def test_breathing_disc(self):
        s = ShapePoint(1, 0, 0)
        assert power_contour(s, with_connection(s, 1, 0, 0), 1.0) == pytest.approx(4 * math.pi, rel=1e-12)

    def test_scales_with_viscosity(self):
        assert power_contour(S, R, 3.0) == pytest.approx(3 * power_contour(S, R, 1.0), rel=1e-12)

    def test_rejects_cusped_shape(self):
        s = ShapePoint(1, 0.2, 0.8 / SQRT2)
        with pytest.raises(FlowDomainError):
            power_contour(s, with_connection(s, 0, 1, 0))

    def test_rejects_inconsistent_rate(self):
        with pytest.raises(ValueError):
            power_contour(S, DeformationRate(R.dW, R.dY, R.dZ, R.dX + 1))

    def test_rejects_coarse_quadrature(self):
        with pytest.raises(ValueError):
            power_contour(S, R, 1.0, 32)

    @settings(max_examples=40, deadline=None)
    @given(rates, rates, rates, st.integers(0, 10_000))
    def test_matches_closed_form(self, dW, dY, dZ, seed):
        s = random_interior_shapes(np.random.default_rng(seed), 1, margin=1e-2)[0]
        r = with_connection(s, dW, dY, dZ)
        exact = power_closed_form(r)
        assert power_contour(s, r, 1.0, 512) == pytest.approx(exact, rel=1e-6, abs=1e-12)


class TestStokesResidual:
    Z0 = complex(map_value(S, 2 * np.exp(1j * math.pi / 5)))

    def test_rest(self):
        assert stokes_residual(S, REST, 1.0, self.Z0, 1e-3) == (0.0, 0.0)

    def test_example_small(self):
        div, mom = stokes_residual(S, R, 1.0, self.Z0, 1e-3)
        assert div <= 1e-3 and mom <= 1e-3

    def test_second_order(self):
        a = stokes_residual(S, R, 1.0, self.Z0, 1e-3)
        b = stokes_residual(S, R, 1.0, self.Z0, 1e-4)
        assert 50 < a[1] / b[1] < 200

    def test_rejects_point_near_body(self):
        with pytest.raises(FlowDomainError):
            stokes_residual(S, R, 1.0, complex(map_value(S, 1.0001)), 1e-3)

    def test_rejects_bad_h(self):
        with pytest.raises(ValueError):
            stokes_residual(S, R, 1.0, self.Z0, 0.0)
