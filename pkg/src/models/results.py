"""
Result records of the averaging and shooting analyses.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from src.models.dynamics import ForcingSeries, Mat2, ModelParams, State


@dataclass(frozen=True)
class BifurcationValue:
    """
    Value (f11, f21) of the averaged (bifurcation) function.

    Example:
        >>> BifurcationValue(3.0, -4.0).norm()
        5.0
    """

    f11: float
    f21: float

    def __post_init__(self):
        if not (math.isfinite(self.f11) and math.isfinite(self.f21)):
            raise ValueError(f"Invalid bifurcation value: ({self.f11}, {self.f21}).")

    def norm(self) -> float:
        return math.hypot(self.f11, self.f21)

    def __sub__(self, other: "BifurcationValue") -> "BifurcationValue":
        return BifurcationValue(self.f11 - other.f11, self.f21 - other.f21)

    def __add__(self, other: "BifurcationValue") -> "BifurcationValue":
        return BifurcationValue(self.f11 + other.f11, self.f21 + other.f21)

    def as_tuple(self) -> Tuple[float, float]:
        return self.f11, self.f21

    def to_dict(self) -> dict:
        return {"f11": self.f11, "f21": self.f21}


@dataclass(frozen=True)
class AveragingPrediction:
    """
    Zero of the bifurcation function predicted by first-order averaging.

    Attributes:
        x0_star: Initial position of the predicted periodic orbit
        y0_star: Initial velocity (omega^3 convention under the cube root)
        det_jacobian: Jacobian determinant of the bifurcation function there
        residual_norm: Norm of the bifurcation function there
        tolerance: Tolerance used for the verified flag
        sign_convention: 'positive' or 'negative' cube roots, whichever scored lower
        convention_residuals: Residual of each sign convention
    """

    x0_star: float
    y0_star: float
    det_jacobian: float
    residual_norm: float
    tolerance: float = 1e-10
    sign_convention: str = "positive"
    convention_residuals: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.sign_convention not in ("positive", "negative"):
            raise ValueError(f"Invalid sign convention: {self.sign_convention}")

    @property
    def verified(self) -> bool:
        """True when the residual is within tolerance."""
        return self.residual_norm <= self.tolerance

    @property
    def nondegenerate(self) -> bool:
        """True when the Jacobian determinant is nonzero."""
        return self.det_jacobian != 0.0

    @property
    def state(self) -> State:
        return State(self.x0_star, self.y0_star)

    def to_dict(self) -> dict:
        return {
            "x0_star": self.x0_star,
            "y0_star": self.y0_star,
            "det_jacobian": self.det_jacobian,
            "residual_norm": self.residual_norm,
            "tolerance": self.tolerance,
            "verified": self.verified,
            "nondegenerate": self.nondegenerate,
            "sign_convention": self.sign_convention,
            "convention_residuals": dict(self.convention_residuals),
        }


@dataclass(frozen=True)
class PeriodicOrbit:
    """
    T-periodic orbit of the full system refined by shooting.

    Attributes:
        z_star: Refined initial condition
        period: Period T = 2 pi / omega_p
        residual: Norm of phi_T(z*) - z*
        monodromy: Linearized period map at z*
        multipliers: Floquet multipliers (eigenvalues of the monodromy)
        iterations: Newton iterations used
        params: Parameters the orbit was computed for
        forcing: Forcing the orbit was computed for
    """

    z_star: State
    period: float
    residual: float
    monodromy: Mat2
    multipliers: Tuple[complex, complex]
    iterations: int = 0
    params: Optional[ModelParams] = None
    forcing: Optional[ForcingSeries] = None

    @property
    def max_multiplier(self) -> float:
        """Largest multiplier modulus."""
        return max(abs(m) for m in self.multipliers)

    def to_dict(self) -> dict:
        return {
            "z_star": self.z_star.to_dict(),
            "period": self.period,
            "residual": self.residual,
            "iterations": self.iterations,
            "monodromy": self.monodromy.to_rows(),
            "det_monodromy": self.monodromy.det,
            "multipliers": [{"re": m.real, "im": m.imag} for m in self.multipliers],
            "max_multiplier": self.max_multiplier,
        }


@dataclass(frozen=True)
class ConvergenceRow:
    """One epsilon of a convergence study; error is None when shooting failed."""

    epsilon: float
    error: Optional[float]
    message: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is not None


@dataclass(frozen=True)
class ConvergenceStudy:
    """
    Distance of refined orbits to the averaging prediction as epsilon shrinks.

    Attributes:
        rows: One row per epsilon, in input order
        slope: Least-squares log-log exponent, None when fewer than two rows succeeded
    """

    rows: List[ConvergenceRow]
    slope: Optional[float]

    @property
    def slope_defined(self) -> bool:
        return self.slope is not None
