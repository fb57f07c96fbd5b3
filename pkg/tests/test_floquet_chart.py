"""
Unit tests for Floquet classification, stability charts and tongue boundaries.
"""

import math

import numpy as np
import pytest

from src.models.chart import AxisSpec
from src.models.dynamics import Mat2, ModelParams, ForcingSeries
from src.models.errors import BracketError, IntegrationQualityError
from src.services.floquet_chart import (
    classify_point,
    first_tongue_boundaries,
    floquet_multipliers,
    half_period_factors,
    mathieu_monodromy_batch,
    sweep_chart,
    tongue_boundary_bisect,
)
from src.services.ode_core import monodromy


def rotation(angle):
    return Mat2(math.cos(angle), math.sin(angle), -math.sin(angle), math.cos(angle))


class TestClassifyPoint:
    """Tests for the Floquet verdict."""

    def test_identity_is_boundary(self):
        """Test |tr| = 2 is a boundary."""
        assert classify_point(Mat2.identity()) == "boundary"

    def test_rotation_is_stable(self):
        """Test a rotation is stable."""
        assert classify_point(rotation(0.7)) == "stable"

    def test_hyperbolic_is_unstable(self):
        """Test diag(2, 1/2) is unstable."""
        assert classify_point(Mat2(2.0, 0.0, 0.0, 0.5)) == "unstable"

    def test_negative_trace(self):
        """Test -diag(2, 1/2) is unstable and -I is a boundary."""
        assert classify_point(Mat2(-2.0, 0.0, 0.0, -0.5)) == "unstable"
        assert classify_point(Mat2(-1.0, 0.0, 0.0, -1.0)) == "boundary"

    def test_margin(self):
        """Test a trace within the margin of 2 is a boundary."""
        near = rotation(1e-6)
        assert classify_point(near) == "boundary"
        assert classify_point(near, margin=1e-14) == "stable"

    def test_determinant_drift(self):
        """Test det far from 1 raises IntegrationQualityError."""
        with pytest.raises(IntegrationQualityError):
            classify_point(Mat2(2.0, 0.0, 0.0, 2.0))

    def test_multipliers(self):
        """Test the multipliers of a stable matrix lie on the unit circle."""
        lam1, lam2 = floquet_multipliers(rotation(0.4))
        assert abs(lam1) == pytest.approx(1.0)
        assert lam1 * lam2 == pytest.approx(1.0)


class TestMonodromyBatch:
    """Tests for the vectorized monodromy sweep."""

    def test_zero_epsilon_traces(self):
        """Test tr M = 2 cos(2 pi sqrt(delta) / omega_p) at eps = 0."""
        deltas = np.array([0.1, 0.5, 0.8, 1.5, 2.0])
        matrices = mathieu_monodromy_batch(deltas, np.zeros_like(deltas), 2.0)
        traces = matrices[:, 0, 0] + matrices[:, 1, 1]
        np.testing.assert_allclose(traces, 2 * np.cos(math.pi * np.sqrt(deltas)), atol=1e-9)

    def test_matches_single_monodromy(self):
        """Test a batch entry agrees with the adaptive monodromy."""
        matrices = mathieu_monodromy_batch([1.2], [0.3], 2.0)
        p = ModelParams(omega_n=math.sqrt(1.2), omega_p=2.0, epsilon=0.3)
        single = monodromy(p, ForcingSeries(), "linear-mathieu", tol=1e-12)
        np.testing.assert_allclose(matrices[0], single.as_array(), atol=1e-9)

    def test_shape_mismatch(self):
        """Test arrays of different length are rejected."""
        with pytest.raises(ValueError):
            mathieu_monodromy_batch([0.1, 0.2], [0.0], 2.0)


class TestSweepChart:
    """Tests for the stability chart."""

    def test_row_at_small_epsilon(self):
        """Test stable, unstable, stable across the first tongue at eps = 0.1."""
        chart = sweep_chart(AxisSpec(0.5, 1.5, 3), AxisSpec(0.0, 0.1, 2))
        assert [c.verdict for c in chart.row(1)] == ["stable", "unstable", "stable"]
        assert chart.row(0)[1].verdict == "boundary"

    def test_determinant_quality_default_grid(self):
        """Test det M stays within 1e-9 of 1 over the default 101 x 21 grid."""
        chart = sweep_chart(AxisSpec(0.0, 2.0, 101), AxisSpec(0.0, 0.4, 21))
        assert len(chart.cells) == 101 * 21
        assert all(c.det_ok for c in chart.cells)
        assert all(c.verdict != "failed" for c in chart.cells)

    def test_row_major_order(self):
        """Test rows follow epsilon and columns follow delta."""
        chart = sweep_chart(AxisSpec(0.0, 1.0, 3), AxisSpec(0.0, 0.2, 2))
        assert [c.delta for c in chart.row(1)] == [0.0, 0.5, 1.0]
        assert chart.cell(1, 2).epsilon == 0.2

    def test_epsilon_symmetry(self):
        """Test tr M is even in eps."""
        chart = sweep_chart(AxisSpec(0.2, 1.8, 9), AxisSpec(-0.3, 0.3, 7))
        for row in range(3):
            upper = [c.trace for c in chart.row(6 - row)]
            lower = [c.trace for c in chart.row(row)]
            np.testing.assert_allclose(upper, lower, atol=1e-9)

    def test_overflow_marks_cell_failed(self):
        """Test an overflowing cell is recorded as failed and the rest survive."""
        chart = sweep_chart(AxisSpec(-1e6, 1.0, 2), AxisSpec(0.0, 0.1, 2))
        verdicts = [c.verdict for c in chart.cells]
        assert verdicts.count("failed") == 2
        failed = chart.cell(0, 0)
        assert failed.error is not None
        assert math.isnan(failed.trace)
        assert chart.cell(0, 1).verdict == "boundary"

    def test_adaptive_matches_fixed(self):
        """Test the adaptive sweep agrees with the vectorized RK4 sweep."""
        delta, eps = AxisSpec(0.2, 1.8, 5), AxisSpec(0.0, 0.3, 3)
        fixed = sweep_chart(delta, eps)
        adaptive = sweep_chart(delta, eps, fixed_steps=None, tol=1e-12)
        np.testing.assert_allclose([c.trace for c in adaptive.cells], [c.trace for c in fixed.cells], atol=1e-7)
        assert [c.verdict for c in adaptive.cells] == [c.verdict for c in fixed.cells]

    def test_repeatable(self):
        """Test two sweeps give identical traces."""
        a = sweep_chart(AxisSpec(0.0, 2.0, 11), AxisSpec(0.0, 0.4, 3))
        b = sweep_chart(AxisSpec(0.0, 2.0, 11), AxisSpec(0.0, 0.4, 3))
        assert [c.trace for c in a.cells] == [c.trace for c in b.cells]

    def test_invalid_omega_p(self):
        """Test omega_p <= 0 is rejected."""
        with pytest.raises(ValueError):
            sweep_chart(AxisSpec(0.0, 1.0, 2), AxisSpec(0.0, 0.1, 2), omega_p=0.0)

    def test_metadata(self):
        """Test the chart metadata."""
        meta = sweep_chart(AxisSpec(0.0, 1.0, 2), AxisSpec(0.0, 0.1, 2)).metadata()
        assert meta["omega_p"] == 2.0
        assert meta["period"] == pytest.approx(math.pi)


class TestTongueBoundaries:
    """Tests for boundary bisection."""

    @pytest.mark.parametrize("delta,epsilon", [(0.6, 0.1), (1.0, 0.2), (1.7, 0.35)])
    def test_trace_factorization(self, delta, epsilon):
        """Test tr + 2 = 4 C S' and tr - 2 = 4 S C'."""
        c, ds, s, dc = half_period_factors(delta, epsilon, 2.0)
        p = ModelParams(omega_n=math.sqrt(delta), omega_p=2.0, epsilon=epsilon)
        trace = monodromy(p, ForcingSeries(), tol=1e-12).trace
        assert trace + 2 == pytest.approx(4 * c * ds, abs=1e-9)
        assert trace - 2 == pytest.approx(4 * s * dc, abs=1e-9)

    def test_lower_boundary(self):
        """Test the lower boundary at eps = 0.1 near 0.95."""
        root = tongue_boundary_bisect(0.1, 2.0, (0.9, 1.0))
        assert root == pytest.approx(1.0 - 0.05 - 0.01 / 32, abs=1e-4)

    def test_tip_at_zero_epsilon(self):
        """Test the tongue tip delta = 1 is found at eps = 0."""
        assert tongue_boundary_bisect(0.0, 2.0, (0.9, 1.1)) == pytest.approx(1.0, abs=1e-9)

    def test_no_sign_change(self):
        """Test a bracket between tongues raises BracketError."""
        with pytest.raises(BracketError):
            tongue_boundary_bisect(0.1, 2.0, (0.3, 0.5))

    def test_invalid_bracket(self):
        """Test an empty bracket is rejected."""
        with pytest.raises(ValueError):
            tongue_boundary_bisect(0.1, 2.0, (1.0, 0.9))

    @pytest.mark.parametrize("epsilon", [0.05, 0.1, 0.2])
    def test_first_tongue_second_order(self, epsilon):
        """Test both boundaries against 1 -+ eps/2 - eps^2/32."""
        lower, upper = first_tongue_boundaries(epsilon)
        correction = epsilon ** 2 / 32
        assert lower == pytest.approx(1.0 - epsilon / 2 - correction, abs=1e-4)
        assert upper == pytest.approx(1.0 + epsilon / 2 - correction, abs=1e-4)
        assert abs(lower - (1.0 - epsilon / 2)) < epsilon ** 2
        assert abs(upper - (1.0 + epsilon / 2)) < epsilon ** 2

    def test_first_tongue_closes_at_zero(self):
        """Test both boundaries meet at the tip for eps = 0."""
        lower, upper = first_tongue_boundaries(0.0)
        assert lower == pytest.approx(1.0, abs=1e-9)
        assert upper == pytest.approx(1.0, abs=1e-9)

    def test_boundary_is_marginal(self):
        """Test |tr M| = 2 at a bisected boundary."""
        lower, _ = first_tongue_boundaries(0.1)
        p = ModelParams(omega_n=math.sqrt(lower), omega_p=2.0, epsilon=0.1)
        assert abs(monodromy(p, ForcingSeries(), tol=1e-12).trace) == pytest.approx(2.0, abs=1e-8)

    def test_fixed_step_boundaries(self):
        """Test RK4 half-period factors give the adaptive boundaries."""
        adaptive = first_tongue_boundaries(0.1)
        fixed = first_tongue_boundaries(0.1, fixed_steps=4000)
        assert fixed == pytest.approx(adaptive, abs=1e-8)
        assert half_period_factors(1.2, 0.1, 2.0, fixed_steps=4000) == pytest.approx(
            half_period_factors(1.2, 0.1, 2.0), abs=1e-10
        )
