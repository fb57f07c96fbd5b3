"""
Unit tests for vector fields, integrators and monodromy matrices.
"""

import math

import numpy as np
import pytest

from src.models.dynamics import ForcingSeries, ModelParams, State
from src.models.errors import IntegrationError
from src.services.ode_core import (
    eval_forcing,
    flow_with_monodromy,
    full_field,
    integrate,
    integrate_array,
    integrate_fixed,
    monodromy,
    rhs_full,
    rhs_unperturbed,
    trajectory,
    unperturbed_field,
    unperturbed_flow_closed,
)


@pytest.fixture
def resonant():
    """Resonant parameters omega = 1, eps = 0.01, alpha = 1."""
    return ModelParams.resonant(1.0, epsilon=0.01, alpha=1.0)


@pytest.fixture
def cosine():
    """Forcing f(t) = cos t."""
    return ForcingSeries.first_harmonic(1.0)


class TestEvalForcing:
    """Tests for forcing evaluation."""

    def test_empty_series_is_zero(self):
        """Test an empty series evaluates to zero everywhere."""
        assert eval_forcing(ForcingSeries(), 1.0, 3.7) == 0.0
        assert np.all(eval_forcing(ForcingSeries(), 1.0, np.linspace(0, 5, 7)) == 0.0)

    def test_first_harmonic_at_zero(self):
        """Test cos term at t = 0."""
        assert eval_forcing(ForcingSeries(a=[1.0], b=[2.0]), 1.0, 0.0) == pytest.approx(1.0)

    def test_periodicity(self):
        """Test f(t + T) = f(t) for a multi-harmonic series."""
        f = ForcingSeries(a=[1.0, 0.3, -0.2], b=[0.5, 0.0, 0.1])
        omega = 2.0
        period = 2 * math.pi / omega
        for t in (0.0, 0.37, 5.0, 123.4):
            assert eval_forcing(f, omega, t + period) == pytest.approx(eval_forcing(f, omega, t), abs=1e-12)

    def test_vectorized_matches_scalar(self):
        """Test array evaluation agrees with scalar evaluation."""
        f = ForcingSeries(a=[1.0, 0.5], b=[0.2, -0.4])
        times = np.linspace(0.0, 10.0, 11)
        values = eval_forcing(f, 1.3, times)
        for t, v in zip(times, values):
            assert v == pytest.approx(eval_forcing(f, 1.3, float(t)), abs=1e-14)

    def test_invalid_omega(self):
        """Test nonpositive frequency is rejected."""
        with pytest.raises(ValueError, match="Must be > 0"):
            eval_forcing(ForcingSeries(a=[1.0]), 0.0, 1.0)


class TestVectorFields:
    """Tests for the right-hand sides."""

    def test_rhs_full_substitution(self):
        """Test rhs_full at t = 0, z = (1, 0)."""
        p = ModelParams.resonant(1.0, epsilon=0.1, alpha=1.0)
        out = rhs_full(p, ForcingSeries.first_harmonic(1.0), 0.0, State(1.0, 0.0))
        assert out.x == 0.0
        assert out.y == pytest.approx(-1.1)

    def test_rhs_full_eps_zero_is_unperturbed(self, cosine):
        """Test eps = 0 reduces to the harmonic oscillator."""
        p = ModelParams.resonant(2.0, epsilon=0.0)
        s = State(0.3, -0.7)
        assert rhs_full(p, cosine, 1.2, s) == rhs_unperturbed(p, s)

    def test_array_field_matches_state_form(self, resonant, cosine):
        """Test full_field agrees with rhs_full."""
        field = full_field(resonant, cosine)
        s = State(0.4, 1.1)
        out = field(2.5, s.as_array())
        expected = rhs_full(resonant, cosine, 2.5, s)
        assert out[0] == pytest.approx(expected.x)
        assert out[1] == pytest.approx(expected.y, abs=1e-15)


class TestIntegrate:
    """Tests for the integrators."""

    def test_zero_length_interval_returns_start(self, resonant, cosine):
        """Test t1 == t0 returns z0 exactly."""
        z0 = State(0.123456789, -9.87654321)
        assert integrate(full_field(resonant, cosine), z0, 1.5, 1.5) == z0

    def test_backward_interval_rejected(self, resonant):
        """Test t1 < t0 is rejected."""
        with pytest.raises(ValueError, match="t1"):
            integrate(unperturbed_field(resonant), State(1.0, 0.0), 1.0, 0.0)

    def test_invalid_tolerance(self, resonant):
        """Test nonpositive tolerance is rejected."""
        with pytest.raises(ValueError, match="tolerance"):
            integrate(unperturbed_field(resonant), State(1.0, 0.0), 0.0, 1.0, tol=0.0)

    @pytest.mark.parametrize("omega", [0.5, 1.0, 2.0])
    def test_matches_closed_form_over_ten_periods(self, omega):
        """Test sampled adaptive solutions track the closed-form flow over 10T at tol 1e-10."""
        p = ModelParams.resonant(omega)
        rng = np.random.default_rng(17)
        times = np.linspace(0.0, 10 * p.period, 200)
        for _ in range(5):
            z0 = State(*(rng.uniform(0.25, 1.0, size=2) * rng.choice([-1.0, 1.0], size=2)))
            rows = trajectory(unperturbed_field(p), z0.as_array(), times, tol=1e-10)
            exact = np.array([unperturbed_flow_closed(p, z0, t).as_array() for t in times])
            assert np.max(np.abs(rows - exact)) <= 1e-9

    def test_closed_form_quarter_period(self):
        """Test closed-form flow at a quarter period with omega = 2."""
        p = ModelParams.resonant(2.0)
        out = unperturbed_flow_closed(p, State(1.0, 0.0), p.period / 4)
        assert out.x == pytest.approx(0.0, abs=1e-15)
        assert out.y == pytest.approx(-2.0)

    def test_fixed_step_agrees_with_adaptive(self, resonant, cosine):
        """Test RK4 with 4000 steps matches the adaptive scheme."""
        z0 = State(1.1, 0.0)
        adaptive = integrate(full_field(resonant, cosine), z0, 0.0, resonant.period, tol=1e-12)
        fixed = integrate(full_field(resonant, cosine), z0, 0.0, resonant.period, fixed_steps=4000)
        assert adaptive.distance(fixed) < 1e-9

    def test_fixed_step_count_validated(self, resonant):
        """Test a zero step count is rejected."""
        with pytest.raises(ValueError, match="step count"):
            integrate_fixed(unperturbed_field(resonant), np.array([1.0, 0.0]), 0.0, 1.0, steps=0)

    def test_blow_up_guard(self):
        """Test finite-time blow-up of y' = y^2 raises IntegrationError."""
        with pytest.raises(IntegrationError):
            integrate_array(lambda t, y: y * y, np.array([1.0]), 0.0, 2.0)

    def test_fixed_step_blow_up_guard(self):
        """Test the fixed-step guard catches blow-up."""
        with pytest.raises(IntegrationError):
            integrate_fixed(lambda t, y: y * y, np.array([1.0]), 0.0, 2.0, steps=1000)

    @pytest.mark.parametrize("omega", [0.5, 1.0, 2.0])
    def test_energy_conserved(self, omega):
        """Test omega^2 x^2 + y^2 drifts by less than 1e-9 relative over 10T at tol 1e-10."""
        p = ModelParams.resonant(omega)
        rng = np.random.default_rng(29)
        times = np.linspace(0.0, 10 * p.period, 200)
        for _ in range(5):
            z0 = rng.uniform(0.25, 1.0, size=2) * rng.choice([-1.0, 1.0], size=2)
            rows = trajectory(unperturbed_field(p), z0, times, tol=1e-10)
            energy = omega ** 2 * rows[:, 0] ** 2 + rows[:, 1] ** 2
            assert np.max(np.abs(energy - energy[0])) / energy[0] < 1e-9

    def test_trajectory_samples(self):
        """Test trajectory returns one row per sample time."""
        p = ModelParams.resonant(1.0)
        times = np.linspace(0.0, p.period, 9)
        rows = trajectory(unperturbed_field(p), np.array([1.0, 0.0]), times, tol=1e-12)
        assert rows.shape == (9, 2)
        np.testing.assert_allclose(rows[:, 0], np.cos(times), atol=1e-9)

    def test_trajectory_rejects_decreasing_times(self):
        """Test nonmonotone sample times are rejected."""
        p = ModelParams.resonant(1.0)
        with pytest.raises(ValueError, match="nondecreasing"):
            trajectory(unperturbed_field(p), np.array([1.0, 0.0]), [0.0, 2.0, 1.0])


class TestMonodromy:
    """Tests for monodromy matrices."""

    def test_linear_mathieu_determinant(self):
        """Test Liouville: det(M) = 1."""
        p = ModelParams(omega_n=1.0, omega_p=2.0, epsilon=0.3, alpha=0.0)
        m = monodromy(p, ForcingSeries(), "linear-mathieu")
        assert m.det == pytest.approx(1.0, abs=1e-9)

    def test_rotation_trace_at_eps_zero(self):
        """Test tr M = 2 cos(2 pi sqrt(delta) / omega_p) for eps = 0."""
        p = ModelParams(omega_n=math.sqrt(0.8), omega_p=2.0, epsilon=0.0)
        m = monodromy(p, ForcingSeries(), "linear-mathieu")
        assert m.trace == pytest.approx(2 * math.cos(math.pi * math.sqrt(0.8)), abs=1e-9)
        assert m.trace == pytest.approx(-1.8910, abs=1e-4)

    def test_fixed_step_mode(self):
        """Test fixed-step monodromy agrees with adaptive."""
        p = ModelParams(omega_n=1.0, omega_p=2.0, epsilon=0.1)
        adaptive = monodromy(p, ForcingSeries())
        fixed = monodromy(p, ForcingSeries(), fixed_steps=4000)
        np.testing.assert_allclose(fixed.as_array(), adaptive.as_array(), atol=1e-9)

    def test_orbit_mode_needs_start(self, resonant, cosine):
        """Test linearized-about-orbit requires z0."""
        with pytest.raises(ValueError, match="z0"):
            monodromy(resonant, cosine, "linearized-about-orbit")

    def test_unknown_mode(self, resonant, cosine):
        """Test an unknown mode is rejected."""
        with pytest.raises(ValueError, match="Invalid monodromy mode"):
            monodromy(resonant, cosine, "floquet")

    def test_orbit_mode_determinant(self, resonant, cosine):
        """Test the orbit variational matrix also has det 1."""
        m = monodromy(resonant, cosine, "linearized-about-orbit", z0=State(1.1, 0.0))
        assert m.det == pytest.approx(1.0, abs=1e-8)

    def test_flow_with_monodromy_matches_flow(self, resonant, cosine):
        """Test the augmented system reproduces the plain flow."""
        z0 = State(1.0, 0.2)
        end, _ = flow_with_monodromy(resonant, cosine, z0, tol=1e-12)
        plain = integrate(full_field(resonant, cosine), z0, 0.0, resonant.period, tol=1e-12)
        assert end.distance(plain) < 1e-9

    def test_orbit_mode_matches_finite_differences(self, resonant, cosine):
        """Test the variational matrix against central differences of the period map."""
        z0 = State(1.0, 0.2)
        _, m = flow_with_monodromy(resonant, cosine, z0, tol=1e-12)
        h = 1e-6
        field = full_field(resonant, cosine)
        columns = []
        for dz in (State(h, 0.0), State(0.0, h)):
            plus = integrate(field, z0 + dz, 0.0, resonant.period, tol=1e-12)
            minus = integrate(field, z0 - dz, 0.0, resonant.period, tol=1e-12)
            columns.append(((plus - minus).as_array()) / (2 * h))
        np.testing.assert_allclose(m.as_array(), np.column_stack(columns), atol=1e-5)
