"""
Unit tests for numerical helpers.
"""

import numpy as np
import pytest

from src.utils.helpers import format_float, loglog_slope, regularized_solve


class TestRegularizedSolve:
    """Tests for regularized_solve."""

    def test_well_conditioned(self):
        """Test a regular system is solved exactly."""
        a = np.array([[2.0, 1.0], [1.0, 3.0]])
        b = np.array([1.0, 2.0])
        np.testing.assert_allclose(a @ regularized_solve(a, b), b, atol=1e-14)

    def test_zero_matrix(self):
        """Test a zero matrix yields a zero step."""
        step = regularized_solve(np.zeros((2, 2)), np.array([1.0, 1.0]))
        assert not np.any(step)

    def test_rank_deficient(self):
        """Test a singular matrix returns the least-squares step."""
        a = np.array([[1.0, 0.0], [0.0, 0.0]])
        step = regularized_solve(a, np.array([2.0, 5.0]))
        assert step[0] == pytest.approx(2.0)
        assert step[1] == pytest.approx(0.0)

    def test_small_but_regular(self):
        """Test an O(eps) but well-conditioned matrix is solved directly."""
        a = 1e-6 * np.array([[1.0, 0.2], [0.1, 1.0]])
        b = np.array([1e-7, -1e-7])
        np.testing.assert_allclose(a @ regularized_solve(a, b), b, rtol=1e-10)


class TestLoglogSlope:
    """Tests for loglog_slope."""

    def test_quadratic(self):
        """Test y = x^2 has slope 2."""
        xs = [0.1, 0.05, 0.025]
        assert loglog_slope(xs, [x * x for x in xs]) == pytest.approx(2.0)

    def test_negative_x(self):
        """Test |x| is used."""
        assert loglog_slope([-0.1, -0.01], [0.1, 0.01]) == pytest.approx(1.0)

    def test_too_few_points(self):
        """Test fewer than two usable points give None."""
        assert loglog_slope([0.1], [0.2]) is None
        assert loglog_slope([0.1, 0.05], [0.2, None]) is None
        assert loglog_slope([0.1, 0.05], [0.2, 0.0]) is None


class TestFormatFloat:
    """Tests for format_float."""

    def test_round_trip_digits(self):
        """Test 17 significant digits."""
        assert float(format_float(1.0 / 3.0)) == 1.0 / 3.0

    def test_special_values(self):
        """Test None, bool, int and NaN."""
        assert format_float(None) == ""
        assert format_float(True) == "true"
        assert format_float(7) == "7"
        assert format_float(float("nan")) == "nan"

    def test_numpy_scalar(self):
        """Test numpy floats are formatted like floats."""
        assert format_float(np.float64(0.5)) == "0.5"
