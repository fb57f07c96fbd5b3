"""
Load JSON run configurations into RunConfig objects.
"""

import json
import logging
from pathlib import Path
from typing import Optional

from src.models.chart import AxisSpec
from src.models.config import (
    BifurcationOptions,
    ChartOptions,
    ConvergeOptions,
    IntegrationOptions,
    PredictOptions,
    RunConfig,
    ShootOptions,
    SlowFlowOptions,
    TrajectoryOptions,
    TransitionOptions,
)
from src.models.dynamics import ForcingSeries, ModelParams
from src.models.errors import ConfigError
from src.parsers.validator import validate_config

logger = logging.getLogger(__name__)


def _axis(section: dict, key: str, default: AxisSpec) -> AxisSpec:
    return AxisSpec.from_dict(section[key]) if key in section else default


def _options(cls, section: dict, **converted):
    """Build an options dataclass from the keys present in a section."""
    values = {k: v for k, v in section.items() if k not in converted}
    values.update({k: v for k, v in converted.items() if v is not None})
    return cls(**values)


def parse_config(data: dict) -> RunConfig:
    """
    Validate a configuration document and resolve defaults.

    Args:
        data: Parsed JSON document (may be partial or empty)

    Returns:
        RunConfig

    Raises:
        ConfigError: Listing every validation problem

    Example:
        >>> parse_config({"model": {"epsilon": 0.005}}).model.epsilon
        0.005
    """
    is_valid, errors = validate_config(data)
    if not is_valid:
        raise ConfigError(errors)

    defaults = RunConfig()
    try:
        model = ModelParams(**{**defaults.model.to_dict(), **data.get("model", {})})
        forcing_section = data.get("forcing", {})
        forcing = ForcingSeries(
            a=tuple(forcing_section.get("a", defaults.forcing.a)),
            b=tuple(forcing_section.get("b", defaults.forcing.b)),
        )
        harmonics = forcing_section.get("harmonics", defaults.harmonics)

        bif = data.get("bifurcation", {})
        chart = data.get("chart", {})
        transition = data.get("transition", {})
        slowflow = data.get("slowflow", {})
        trajectory = slowflow.get("trajectory")
        trajectory_options = None
        if trajectory is not None:
            trajectory_options = _options(
                TrajectoryOptions, trajectory,
                start=tuple(trajectory["start"]) if "start" in trajectory else None,
            )

        return RunConfig(
            model=model,
            forcing=forcing,
            harmonics=harmonics,
            integration=_options(IntegrationOptions, data.get("integration", {})),
            predict=_options(PredictOptions, data.get("predict", {})),
            bifurcation=_options(
                BifurcationOptions, bif,
                x0=_axis(bif, "x0", defaults.bifurcation.x0),
                y0=_axis(bif, "y0", defaults.bifurcation.y0),
            ),
            shoot=_options(ShootOptions, data.get("shoot", {})),
            converge=ConvergeOptions(
                tuple(data.get("converge", {}).get("eps_list", defaults.converge.eps_list))
            ),
            chart=_options(
                ChartOptions, chart,
                delta=_axis(chart, "delta", defaults.chart.delta),
                epsilon=_axis(chart, "epsilon", defaults.chart.epsilon),
            ),
            transition=_options(
                TransitionOptions, transition,
                epsilon=_axis(transition, "epsilon", defaults.transition.epsilon),
            ),
            slowflow=_options(
                SlowFlowOptions, slowflow,
                sweep=_axis(slowflow, "sweep", defaults.slowflow.sweep),
                trajectory=trajectory_options,
            ),
            output_dir=data.get("output", {}).get("dir", defaults.output_dir),
        )
    except (TypeError, ValueError) as e:
        raise ConfigError([str(e)]) from e


def load_config(path: Optional[str] = None) -> RunConfig:
    """
    Load a configuration file; the defaults when no path is given.

    Raises:
        ConfigError: Missing file, invalid JSON or invalid content
    """
    if path is None:
        return RunConfig()
    file_path = Path(path)
    if not file_path.exists():
        raise ConfigError([f"Config file not found: {path}"])
    try:
        with open(file_path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError([f"Invalid JSON in {path}: {e}"]) from e
    logger.debug("Loaded configuration from %s", path)
    return parse_config(data)
