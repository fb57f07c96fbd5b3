"""
Run configuration.

A RunConfig holds every resolved setting of one CLI run: model and
forcing, integrator options and one options block per subcommand.
to_dict() echoes the fully resolved document; the config parser accepts
that echo (or any partial document) and fills in defaults.
"""

from dataclasses import dataclass, field
from typing import Optional, Tuple

from src.models.chart import AxisSpec
from src.models.dynamics import ForcingSeries, ModelParams

DEFAULT_HARMONICS = 8


@dataclass(frozen=True)
class IntegrationOptions:
    """
    Integrator settings.

    Attributes:
        tol: Absolute and relative tolerance of the adaptive scheme
        fixed_step: Use fixed-step RK4 instead of the adaptive scheme
        steps_per_period: RK4 steps per forcing period
    """

    tol: float = 1e-10
    fixed_step: bool = False
    steps_per_period: int = 4000

    @property
    def fixed_steps(self) -> Optional[int]:
        return self.steps_per_period if self.fixed_step else None

    def to_dict(self) -> dict:
        return {"tol": self.tol, "fixed_step": self.fixed_step, "steps_per_period": self.steps_per_period}


@dataclass(frozen=True)
class PredictOptions:
    newton_tol: float = 1e-12
    max_iter: int = 50
    tolerance: float = 1e-10

    def to_dict(self) -> dict:
        return {"newton_tol": self.newton_tol, "max_iter": self.max_iter, "tolerance": self.tolerance}


@dataclass(frozen=True)
class BifurcationOptions:
    """Grid of initial conditions (x0, y0) for the bifurcation table."""

    x0: AxisSpec = AxisSpec(-2.0, 2.0, 9)
    y0: AxisSpec = AxisSpec(-2.0, 2.0, 9)
    quad_points: int = 2048

    def to_dict(self) -> dict:
        return {"x0": self.x0.to_dict(), "y0": self.y0.to_dict(), "quad_points": self.quad_points}


@dataclass(frozen=True)
class ShootOptions:
    tol: float = 1e-10
    max_iter: int = 25
    integration_tol: float = 1e-12
    samples: int = 200

    def to_dict(self) -> dict:
        return {
            "tol": self.tol,
            "max_iter": self.max_iter,
            "integration_tol": self.integration_tol,
            "samples": self.samples,
        }


@dataclass(frozen=True)
class ConvergeOptions:
    eps_list: Tuple[float, ...] = (1e-2, 5e-3, 2.5e-3)

    def to_dict(self) -> dict:
        return {"eps_list": list(self.eps_list)}


@dataclass(frozen=True)
class ChartOptions:
    """Ince-Strutt chart over (delta = omega_n^2, epsilon)."""

    omega_p: float = 2.0
    delta: AxisSpec = AxisSpec(0.0, 2.0, 101)
    epsilon: AxisSpec = AxisSpec(0.0, 0.4, 21)
    margin: float = 1e-9
    adaptive: bool = False

    def to_dict(self) -> dict:
        return {
            "omega_p": self.omega_p,
            "delta": self.delta.to_dict(),
            "epsilon": self.epsilon.to_dict(),
            "margin": self.margin,
            "adaptive": self.adaptive,
        }


@dataclass(frozen=True)
class TransitionOptions:
    omega_p: float = 2.0
    epsilon: AxisSpec = AxisSpec(0.0, 0.2, 5)
    bisect: bool = True
    tol: float = 1e-10

    def to_dict(self) -> dict:
        return {"omega_p": self.omega_p, "epsilon": self.epsilon.to_dict(), "bisect": self.bisect, "tol": self.tol}


@dataclass(frozen=True)
class TrajectoryOptions:
    """Optional slow-flow trajectory: start (M, N), slow-time horizon, sample count."""

    start: Tuple[float, float] = (0.1, 0.0)
    t_end: float = 50.0
    samples: int = 201

    def to_dict(self) -> dict:
        return {"start": list(self.start), "t_end": self.t_end, "samples": self.samples}


@dataclass(frozen=True)
class SlowFlowOptions:
    omega_p: float = 2.0
    omega_1: float = 1.0
    alpha: float = -1.0
    epsilon: float = 0.1
    sweep: AxisSpec = AxisSpec(-1.0, 1.0, 41)
    trajectory: Optional[TrajectoryOptions] = None

    def to_dict(self) -> dict:
        return {
            "omega_p": self.omega_p,
            "omega_1": self.omega_1,
            "alpha": self.alpha,
            "epsilon": self.epsilon,
            "sweep": self.sweep.to_dict(),
            "trajectory": self.trajectory.to_dict() if self.trajectory else None,
        }


@dataclass(frozen=True)
class RunConfig:
    """
    Fully resolved configuration of one run.

    Example:
        >>> RunConfig().model.epsilon
        0.01
        >>> RunConfig().forcing.a1
        1.0
    """

    model: ModelParams = ModelParams(omega_n=1.0, omega_p=1.0, epsilon=0.01, alpha=1.0)
    forcing: ForcingSeries = ForcingSeries(a=(1.0,), b=(0.0,))
    harmonics: int = DEFAULT_HARMONICS
    integration: IntegrationOptions = field(default_factory=IntegrationOptions)
    predict: PredictOptions = field(default_factory=PredictOptions)
    bifurcation: BifurcationOptions = field(default_factory=BifurcationOptions)
    shoot: ShootOptions = field(default_factory=ShootOptions)
    converge: ConvergeOptions = field(default_factory=ConvergeOptions)
    chart: ChartOptions = field(default_factory=ChartOptions)
    transition: TransitionOptions = field(default_factory=TransitionOptions)
    slowflow: SlowFlowOptions = field(default_factory=SlowFlowOptions)
    output_dir: str = "output"

    def __post_init__(self):
        if self.forcing.harmonics > self.harmonics:
            raise ValueError(
                f"Forcing has {self.forcing.harmonics} harmonics, more than the configured {self.harmonics}."
            )

    def with_overrides(self, output_dir: Optional[str] = None, fixed_step: Optional[bool] = None) -> "RunConfig":
        """Copy with command-line overrides applied."""
        integration = self.integration
        if fixed_step is not None:
            integration = IntegrationOptions(integration.tol, fixed_step, integration.steps_per_period)
        return RunConfig(
            self.model, self.forcing, self.harmonics, integration, self.predict, self.bifurcation,
            self.shoot, self.converge, self.chart, self.transition, self.slowflow,
            output_dir if output_dir is not None else self.output_dir,
        )

    def to_dict(self) -> dict:
        forcing = self.forcing.to_dict()
        forcing["harmonics"] = self.harmonics
        return {
            "model": self.model.to_dict(),
            "forcing": forcing,
            "integration": self.integration.to_dict(),
            "predict": self.predict.to_dict(),
            "bifurcation": self.bifurcation.to_dict(),
            "shoot": self.shoot.to_dict(),
            "converge": self.converge.to_dict(),
            "chart": self.chart.to_dict(),
            "transition": self.transition.to_dict(),
            "slowflow": self.slowflow.to_dict(),
            "output": {"dir": self.output_dir},
        }
