"""
Validation functions for run configurations.

validate_config checks a raw JSON document against the schema and
collects every problem instead of stopping at the first one; unknown keys
are rejected at every nesting level. validate_command adds the checks
that only apply to one subcommand.
"""

import math
from typing import Any, Callable, Dict, List, Optional, Tuple

from src.models.config import DEFAULT_HARMONICS, RunConfig

COMMANDS = ("predict", "bifurcation", "shoot", "converge", "chart", "transition", "slowflow")


def is_number(value: Any) -> bool:
    """
    True for finite ints and floats (bools excluded).

    Example:
        >>> is_number(1.5)
        True
        >>> is_number(True)
        False
        >>> is_number(float("nan"))
        False
    """
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


def is_count(value: Any, minimum: int = 1) -> bool:
    """True for ints (bools excluded) >= minimum."""
    return isinstance(value, int) and not isinstance(value, bool) and value >= minimum


def validate_axis(value: Any, path: str) -> List[str]:
    """
    Validate an axis object {"min", "max", "count"}.

    Example:
        >>> validate_axis({"min": 0, "max": 1, "count": 3}, "chart.delta")
        []
        >>> validate_axis({"min": 1, "max": 0, "count": 3}, "chart.delta")
        ['chart.delta: max must exceed min']
    """
    if not isinstance(value, dict):
        return [f"{path}: expected an object with min, max, count"]
    errors = [f"Unknown key: {path}.{key}" for key in value if key not in ("min", "max", "count")]
    for key in ("min", "max"):
        if key not in value:
            errors.append(f"{path}.{key} is required")
        elif not is_number(value[key]):
            errors.append(f"{path}.{key} must be a finite number")
    if "count" not in value:
        errors.append(f"{path}.count is required")
    elif not is_count(value["count"], 2):
        errors.append(f"{path}.count must be an integer >= 2")
    if not errors and not value["max"] > value["min"]:
        errors.append(f"{path}: max must exceed min")
    return errors


def _check(predicate: Callable[[Any], bool], message: str) -> Callable[[Any, str], List[str]]:
    def check(value: Any, path: str) -> List[str]:
        return [] if predicate(value) else [f"{path} {message}"]

    return check


def _numbers(value: Any, path: str) -> List[str]:
    if not isinstance(value, list) or not all(is_number(v) for v in value):
        return [f"{path} must be a list of finite numbers"]
    return []


def _point(value: Any, path: str) -> List[str]:
    if not isinstance(value, list) or len(value) != 2 or not all(is_number(v) for v in value):
        return [f"{path} must be a pair of finite numbers"]
    return []


NUMBER = _check(is_number, "must be a finite number")
POSITIVE = _check(lambda v: is_number(v) and v > 0, "must be a number > 0")
NONNEGATIVE = _check(lambda v: is_number(v) and v >= 0, "must be a number >= 0")
NONZERO = _check(lambda v: is_number(v) and v != 0, "must be a nonzero number")
COUNT = _check(is_count, "must be an integer >= 1")
SAMPLES = _check(lambda v: is_count(v, 2), "must be an integer >= 2")
QUAD = _check(lambda v: is_count(v, 64), "must be an integer >= 64")
BOOL = _check(lambda v: isinstance(v, bool), "must be true or false")
STRING = _check(lambda v: isinstance(v, str) and bool(v.strip()), "must be a non-empty string")

TRAJECTORY_SCHEMA = {"start": _point, "t_end": POSITIVE, "samples": SAMPLES}

SCHEMA: Dict[str, Dict[str, Any]] = {
    "model": {"omega_n": POSITIVE, "omega_p": POSITIVE, "epsilon": NUMBER, "alpha": NUMBER},
    "forcing": {"a": _numbers, "b": _numbers, "harmonics": COUNT},
    "integration": {"tol": POSITIVE, "fixed_step": BOOL, "steps_per_period": COUNT},
    "predict": {"newton_tol": POSITIVE, "max_iter": COUNT, "tolerance": POSITIVE},
    "bifurcation": {"x0": validate_axis, "y0": validate_axis, "quad_points": QUAD},
    "shoot": {"tol": POSITIVE, "max_iter": COUNT, "integration_tol": POSITIVE, "samples": SAMPLES},
    "converge": {"eps_list": _numbers},
    "chart": {"omega_p": POSITIVE, "delta": validate_axis, "epsilon": validate_axis, "margin": NONNEGATIVE,
              "adaptive": BOOL},
    "transition": {"omega_p": POSITIVE, "epsilon": validate_axis, "bisect": BOOL, "tol": POSITIVE},
    "slowflow": {
        "omega_p": POSITIVE,
        "omega_1": NUMBER,
        "alpha": NONZERO,
        "epsilon": NUMBER,
        "sweep": validate_axis,
        "trajectory": TRAJECTORY_SCHEMA,
    },
    "output": {"dir": STRING},
}


def _validate_section(data: Any, schema: Dict[str, Any], path: str) -> List[str]:
    if not isinstance(data, dict):
        return [f"{path} must be an object"]
    errors = []
    for key, value in data.items():
        child = f"{path}.{key}"
        if key not in schema:
            errors.append(f"Unknown key: {child}")
        elif isinstance(schema[key], dict):
            if value is not None:
                errors.extend(_validate_section(value, schema[key], child))
        else:
            errors.extend(schema[key](value, child))
    return errors


def _cross_checks(data: dict) -> List[str]:
    errors = []
    forcing = data.get("forcing") or {}
    if isinstance(forcing, dict):
        harmonics = forcing.get("harmonics", DEFAULT_HARMONICS)
        longest = max(len(forcing.get("a") or []), len(forcing.get("b") or []))
        if is_count(harmonics) and longest > harmonics:
            errors.append(f"forcing has {longest} coefficients but harmonics is {harmonics}")
    converge = data.get("converge") or {}
    eps_list = converge.get("eps_list") if isinstance(converge, dict) else None
    if isinstance(eps_list, list) and all(is_number(v) for v in eps_list):
        if not eps_list:
            errors.append("converge.eps_list must not be empty")
        elif any(v == 0 for v in eps_list):
            errors.append("converge.eps_list must not contain 0")
        elif any(abs(b) >= abs(a) for a, b in zip(eps_list, eps_list[1:])):
            errors.append("converge.eps_list must be strictly decreasing in magnitude")
    transition = data.get("transition") or {}
    axis = transition.get("epsilon") if isinstance(transition, dict) else None
    if isinstance(axis, dict) and is_number(axis.get("min")) and axis["min"] < 0:
        errors.append("transition.epsilon.min must be >= 0")
    return errors


def validate_config(data: Any) -> Tuple[bool, List[str]]:
    """
    Validate a raw configuration document.

    Args:
        data: Parsed JSON document

    Returns:
        Tuple of (is_valid, list_of_errors)

    Example:
        >>> validate_config({"model": {"epsilon": 0.01}})
        (True, [])
        >>> validate_config({"modle": {}})
        (False, ['Unknown key: modle'])
    """
    if not isinstance(data, dict):
        return False, ["Configuration must be a JSON object"]
    errors = []
    for key, value in data.items():
        if key not in SCHEMA:
            errors.append(f"Unknown key: {key}")
        else:
            errors.extend(_validate_section(value, SCHEMA[key], key))
    if not errors:
        errors.extend(_cross_checks(data))
    return len(errors) == 0, errors


def validate_command(config: RunConfig, command: str) -> List[str]:
    """
    Preconditions of one subcommand on a resolved configuration.

    Example:
        >>> from src.models.dynamics import ModelParams
        >>> validate_command(RunConfig(model=ModelParams(epsilon=0.0)), "shoot")
        ['model.epsilon must be nonzero for shooting']
    """
    if command not in COMMANDS:
        return [f"Unknown command: {command}"]
    errors = []
    if command == "shoot" and config.model.epsilon == 0:
        errors.append("model.epsilon must be nonzero for shooting")
    return errors
