"""
Unit tests for shooting and the convergence study.
"""

import numpy as np
import pytest

from src.models.dynamics import ForcingSeries, ModelParams, State
from src.models.errors import ConvergenceError, HypothesisError
from src.services import orbit as orbit_module
from src.services.averaging import predict
from src.services.ode_core import full_field, integrate
from src.services.orbit import (
    compare_two_timing,
    convergence_study,
    poincare_displacement,
    sample_orbit,
    shoot_refine,
)
from src.services.two_timing import resonant_equilibrium

FORCING = ForcingSeries.first_harmonic(1.0)


@pytest.fixture(scope="module")
def prediction():
    """Averaging prediction for omega = alpha = a1 = 1, b1 = 0."""
    return predict(1.0, 1.0, 1.0, 0.0)


@pytest.fixture(scope="module")
def refined(prediction):
    """Orbit refined at eps = 0.01 from the prediction."""
    p = ModelParams.resonant(1.0, epsilon=0.01, alpha=1.0)
    return shoot_refine(p, FORCING, prediction.state)


class TestPoincareDisplacement:
    """Tests for the period-map displacement."""

    @pytest.mark.parametrize("z0", [State(1.0, 0.0), State(-0.3, 2.0)])
    def test_unperturbed_orbits_close(self, z0):
        """Test every orbit is T-periodic at eps = 0."""
        p = ModelParams.resonant(1.0, epsilon=0.0)
        assert poincare_displacement(p, FORCING, z0, tol=1e-12).norm() < 1e-9

    def test_perturbed_displacement_is_order_eps(self, prediction):
        """Test the displacement away from the prediction scales with eps."""
        z0 = State(prediction.x0_star + 0.3, 0.0)
        small = poincare_displacement(ModelParams.resonant(1.0, 1e-3, 1.0), FORCING, z0, tol=1e-12).norm()
        large = poincare_displacement(ModelParams.resonant(1.0, 1e-2, 1.0), FORCING, z0, tol=1e-12).norm()
        assert large / small == pytest.approx(10.0, rel=0.1)


class TestShootRefine:
    """Tests for Newton shooting."""

    def test_residual(self, refined):
        """Test the refined orbit meets the shooting tolerance."""
        assert refined.residual <= 1e-10
        assert refined.iterations >= 1

    def test_recloses_over_five_periods(self, refined):
        """Test phi_5T(z*) returns to z*."""
        p = refined.params
        end = integrate(full_field(p, FORCING), refined.z_star, 0.0, 5 * p.period, tol=1e-12)
        assert end.distance(refined.z_star) < 1e-7

    def test_multipliers(self, refined):
        """Test the multiplier product equals det M = 1."""
        lam1, lam2 = refined.multipliers
        assert (lam1 * lam2).real == pytest.approx(refined.monodromy.det, abs=1e-10)
        assert refined.monodromy.det == pytest.approx(1.0, abs=1e-8)

    def test_close_to_prediction(self, refined, prediction):
        """Test the orbit lies within O(eps) of the prediction."""
        assert refined.z_star.distance(prediction.state) < 10 * 0.01

    def test_halving_eps_halves_distance(self, refined, prediction):
        """Test the distance to the prediction roughly halves with eps."""
        p = ModelParams.resonant(1.0, epsilon=0.005, alpha=1.0)
        half = shoot_refine(p, FORCING, prediction.state)
        ratio = refined.z_star.distance(prediction.state) / half.z_star.distance(prediction.state)
        assert ratio == pytest.approx(2.0, rel=0.2)

    def test_start_at_orbit(self, refined):
        """Test a start at z* returns without iterating."""
        again = shoot_refine(refined.params, FORCING, refined.z_star)
        assert again.iterations == 0

    def test_far_start_fails(self):
        """Test a distant start exhausts the iteration cap."""
        p = ModelParams.resonant(1.0, epsilon=0.01, alpha=1.0)
        with pytest.raises(ConvergenceError) as exc:
            shoot_refine(p, FORCING, State(100.0, 0.0), max_iter=2, integration_tol=1e-8)
        assert isinstance(exc.value.best, State)
        assert exc.value.residual > 1e-10

    def test_zero_epsilon_rejected(self, prediction):
        """Test eps = 0 is rejected."""
        with pytest.raises(ValueError, match="epsilon"):
            shoot_refine(ModelParams.resonant(1.0, epsilon=0.0), FORCING, prediction.state)

    def test_invalid_tolerance(self, prediction):
        """Test tol <= 0 is rejected."""
        with pytest.raises(ValueError):
            shoot_refine(ModelParams.resonant(1.0, epsilon=0.01), FORCING, prediction.state, tol=0.0)


class TestSampleOrbit:
    """Tests for orbit sampling."""

    def test_samples(self, refined):
        """Test sample shape and first row."""
        rows = sample_orbit(refined, samples=50)
        assert rows.shape == (50, 3)
        assert rows[0, 0] == 0.0
        assert rows[0, 1] == refined.z_star.x
        assert rows[-1, 0] < refined.period

    def test_too_few_samples(self, refined):
        """Test samples < 2 is rejected."""
        with pytest.raises(ValueError):
            sample_orbit(refined, samples=1)


class TestCompareTwoTiming:
    """Tests for the comparison against the two-timing solution."""

    def test_order_eps(self, refined):
        """Test the deviation from the zeroth-order solution is O(eps)."""
        eq = resonant_equilibrium(1.0, 1.0, 1.0, 0.0)
        assert compare_two_timing(refined, refined.params, eq) <= 10 * 0.01

    def test_scaling(self, refined, prediction):
        """Test the deviation shrinks about tenfold with eps."""
        eq = resonant_equilibrium(1.0, 1.0, 1.0, 0.0)
        p = ModelParams.resonant(1.0, epsilon=0.001, alpha=1.0)
        small = shoot_refine(p, FORCING, prediction.state)
        ratio = compare_two_timing(refined, refined.params, eq) / compare_two_timing(small, p, eq)
        assert 10.0 / 3.0 < ratio < 30.0

    def test_self_comparison(self, refined):
        """Test comparing the orbit with its own samples gives zero."""
        rows = sample_orbit(refined)
        assert compare_two_timing(refined, refined.params, lambda t: rows[:, 1]) == 0.0


class TestConvergenceStudy:
    """Tests for the eps-convergence study."""

    def test_slope_near_one(self):
        """Test the error decays linearly in eps."""
        p = ModelParams.resonant(1.0, alpha=1.0)
        study = convergence_study(p, FORCING, [0.02, 0.01, 0.005])
        assert all(row.ok for row in study.rows)
        assert study.slope == pytest.approx(1.0, abs=0.3)

    def test_single_epsilon(self):
        """Test one row leaves the slope undefined."""
        p = ModelParams.resonant(1.0, alpha=1.0)
        study = convergence_study(p, FORCING, [0.01])
        assert study.slope is None
        assert not study.slope_defined

    def test_failed_row_recorded(self, monkeypatch, prediction):
        """Test a failed refinement marks its row and the study continues."""
        real = orbit_module.shoot_refine

        def flaky(params, *args, **kwargs):
            if params.epsilon == 0.01:
                raise ConvergenceError("forced failure", best=prediction.state)
            return real(params, *args, **kwargs)

        monkeypatch.setattr(orbit_module, "shoot_refine", flaky)
        study = convergence_study(ModelParams.resonant(1.0, alpha=1.0), FORCING, [0.02, 0.01, 0.005])
        assert [row.ok for row in study.rows] == [True, False, True]
        assert "forced failure" in study.rows[1].message
        assert study.slope is not None

    def test_fixed_steps_forwarded(self, monkeypatch):
        """Test fixed_steps reaches every refinement."""
        real = orbit_module.shoot_refine
        seen = []

        def recording(*args, **kwargs):
            seen.append(kwargs.get("fixed_steps"))
            return real(*args, **kwargs)

        monkeypatch.setattr(orbit_module, "shoot_refine", recording)
        study = convergence_study(ModelParams.resonant(1.0, alpha=1.0), FORCING, [0.02, 0.01], fixed_steps=4000)
        assert seen == [4000, 4000]
        assert all(row.ok for row in study.rows)

    @pytest.mark.parametrize("eps_list", [[], [0.1, 0.0], [0.01, 0.02], [0.01, -0.01]])
    def test_invalid_lists(self, eps_list):
        """Test empty, zero-containing and non-decreasing lists are rejected."""
        with pytest.raises(ValueError):
            convergence_study(ModelParams.resonant(1.0), FORCING, eps_list)

    def test_non_resonant_needs_prediction(self):
        """Test a non-resonant template without a prediction is rejected."""
        p = ModelParams(omega_n=1.0, omega_p=1.5)
        with pytest.raises(HypothesisError):
            convergence_study(p, FORCING, [0.01])

    def test_prediction_used(self, prediction):
        """Test an explicit prediction is used as start and reference."""
        study = convergence_study(ModelParams.resonant(1.0, alpha=1.0), FORCING, [0.01], prediction=prediction)
        assert study.rows[0].error < 0.1
        assert np.isfinite(study.rows[0].error)
