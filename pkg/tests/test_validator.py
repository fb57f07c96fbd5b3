"""
Unit tests for validator module.
"""

import pytest
from src.models.config import DEFAULT_HARMONICS, RunConfig
from src.models.dynamics import ModelParams
from src.parsers.validator import (
    COMMANDS,
    is_count,
    is_number,
    validate_axis,
    validate_command,
    validate_config,
)


class TestIsNumber:
    """Tests for number checks."""

    def test_valid_numbers(self):
        """Test finite ints and floats."""
        assert is_number(1) is True
        assert is_number(-2.5) is True
        assert is_number(0.0) is True

    def test_invalid_numbers(self):
        """Test bools, strings and non-finite floats."""
        assert is_number(True) is False
        assert is_number("1.0") is False
        assert is_number(None) is False
        assert is_number(float("inf")) is False

    def test_count(self):
        """Test integer counts with a minimum."""
        assert is_count(3) is True
        assert is_count(1, minimum=2) is False
        assert is_count(2.0) is False
        assert is_count(False) is False


class TestValidateAxis:
    """Tests for axis validation."""

    def test_valid_axis(self):
        """Test a valid axis."""
        assert validate_axis({"min": -1, "max": 1.5, "count": 11}, "chart.delta") == []

    def test_missing_keys(self):
        """Test missing keys are reported."""
        errors = validate_axis({"min": 0}, "chart.delta")
        assert "chart.delta.max is required" in errors
        assert "chart.delta.count is required" in errors

    def test_bad_count(self):
        """Test count below 2."""
        assert validate_axis({"min": 0, "max": 1, "count": 1}, "x") == ["x.count must be an integer >= 2"]

    def test_not_an_object(self):
        """Test a non-object axis."""
        assert validate_axis([0, 1, 3], "x") == ["x: expected an object with min, max, count"]

    def test_unknown_key(self):
        """Test unknown axis keys."""
        assert validate_axis({"min": 0, "max": 1, "count": 3, "step": 0.5}, "x") == ["Unknown key: x.step"]


class TestValidateConfig:
    """Tests for configuration validation."""

    def test_empty_document(self):
        """Test an empty document is valid."""
        assert validate_config({}) == (True, [])

    def test_default_echo_is_valid(self):
        """Test the echoed default configuration validates."""
        is_valid, errors = validate_config(RunConfig().to_dict())
        assert is_valid is True
        assert errors == []

    def test_not_an_object(self):
        """Test a non-object document."""
        assert validate_config([1, 2]) == (False, ["Configuration must be a JSON object"])

    def test_unknown_keys_at_every_level(self):
        """Test unknown keys are rejected at top level and in sections."""
        is_valid, errors = validate_config({"modle": {}, "model": {"omega": 1.0}})
        assert is_valid is False
        assert "Unknown key: modle" in errors
        assert "Unknown key: model.omega" in errors

    def test_collects_all_errors(self):
        """Test every problem is reported, not just the first."""
        is_valid, errors = validate_config({
            "model": {"omega_n": -1.0, "epsilon": "small"},
            "chart": {"delta": {"min": 1, "max": 0, "count": 5}},
        })
        assert is_valid is False
        assert len(errors) == 3

    def test_types(self):
        """Test typed fields."""
        _, errors = validate_config({
            "integration": {"fixed_step": "yes", "steps_per_period": 0},
            "bifurcation": {"quad_points": 32},
        })
        assert "integration.fixed_step must be true or false" in errors
        assert "integration.steps_per_period must be an integer >= 1" in errors
        assert "bifurcation.quad_points must be an integer >= 64" in errors

    def test_slowflow_alpha_nonzero(self):
        """Test the tongue slow flow needs alpha != 0."""
        _, errors = validate_config({"slowflow": {"alpha": 0}})
        assert errors == ["slowflow.alpha must be a nonzero number"]

    def test_trajectory(self):
        """Test the nested trajectory section."""
        assert validate_config({"slowflow": {"trajectory": None}})[0] is True
        _, errors = validate_config({"slowflow": {"trajectory": {"start": [1.0], "t_end": 0}}})
        assert "slowflow.trajectory.start must be a pair of finite numbers" in errors
        assert "slowflow.trajectory.t_end must be a number > 0" in errors

    def test_too_many_coefficients(self):
        """Test forcing longer than the harmonic count."""
        _, errors = validate_config({"forcing": {"a": [1, 0, 0], "harmonics": 2}})
        assert errors == ["forcing has 3 coefficients but harmonics is 2"]

    def test_default_harmonic_cap(self):
        """Test the cap falls back to the configured default harmonic count."""
        at_cap = [1.0] + [0.0] * (DEFAULT_HARMONICS - 1)
        assert validate_config({"forcing": {"a": at_cap}})[0] is True
        _, errors = validate_config({"forcing": {"a": at_cap + [0.5]}})
        assert errors == [f"forcing has {DEFAULT_HARMONICS + 1} coefficients but harmonics is {DEFAULT_HARMONICS}"]
        assert RunConfig().harmonics == DEFAULT_HARMONICS

    @pytest.mark.parametrize("eps_list,message", [
        ([], "converge.eps_list must not be empty"),
        ([0.01, 0.0], "converge.eps_list must not contain 0"),
        ([0.01, 0.02], "converge.eps_list must be strictly decreasing in magnitude"),
    ])
    def test_eps_list(self, eps_list, message):
        """Test the convergence epsilon list."""
        assert validate_config({"converge": {"eps_list": eps_list}}) == (False, [message])

    def test_transition_epsilon_nonnegative(self):
        """Test transition epsilons must be >= 0."""
        _, errors = validate_config({"transition": {"epsilon": {"min": -0.1, "max": 0.1, "count": 3}}})
        assert errors == ["transition.epsilon.min must be >= 0"]


class TestValidateCommand:
    """Tests for per-command checks."""

    def test_all_commands_accept_defaults(self):
        """Test the defaults pass every command."""
        for command in COMMANDS:
            assert validate_command(RunConfig(), command) == []

    def test_shoot_needs_epsilon(self):
        """Test shooting with eps = 0."""
        config = RunConfig(model=ModelParams(epsilon=0.0))
        assert validate_command(config, "shoot") == ["model.epsilon must be nonzero for shooting"]
        assert validate_command(config, "predict") == []

    def test_unknown_command(self):
        """Test an unknown command."""
        assert validate_command(RunConfig(), "plot") == ["Unknown command: plot"]
