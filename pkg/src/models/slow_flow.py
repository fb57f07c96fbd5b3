"""
Slow-flow types of the two-timing analysis.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional

from src.models.dynamics import State

TWO_PI = 2.0 * math.pi

CLASSIFICATIONS = ("center", "saddle", "degenerate")


def normalize_angle(angle: float) -> float:
    """
    Reduce an angle to [0, 2 pi).

    Example:
        >>> normalize_angle(-math.pi / 2) == 3 * math.pi / 2
        True
    """
    reduced = angle % TWO_PI
    return 0.0 if reduced >= TWO_PI else reduced


@dataclass(frozen=True)
class SlowState:
    """
    Amplitude/phase pair (A, psi) of the slow flow.

    A is kept nonnegative and psi is reported in [0, 2 pi).

    Example:
        >>> SlowState(1.0, -math.pi).psi == math.pi
        True
    """

    A: float
    psi: float

    def __post_init__(self):
        if not (math.isfinite(self.A) and math.isfinite(self.psi)):
            raise ValueError(f"Invalid slow state: ({self.A}, {self.psi}).")
        if self.A < 0:
            raise ValueError(f"Invalid amplitude: {self.A}. Must be >= 0.")
        object.__setattr__(self, "psi", normalize_angle(self.psi))


@dataclass(frozen=True)
class CartesianSlowState:
    """Slow flow in (M, N) = (A cos psi, -A sin psi)."""

    M: float
    N: float

    def __post_init__(self):
        if not (math.isfinite(self.M) and math.isfinite(self.N)):
            raise ValueError(f"Invalid slow state: ({self.M}, {self.N}).")

    def norm(self) -> float:
        return math.hypot(self.M, self.N)

    def to_dict(self) -> dict:
        return {"M": self.M, "N": self.N}


@dataclass(frozen=True)
class TongueParams:
    """
    Parameters of the first-tongue slow flow.

    Attributes:
        omega_p: Parametric frequency (> 0)
        omega_1: Detuning, omega_n^2 = omega_p^2 / 4 + eps omega_1
        alpha: Cubic stiffness (!= 0)
        epsilon: Perturbation size
    """

    omega_p: float = 2.0
    omega_1: float = 0.0
    alpha: float = -1.0
    epsilon: float = 0.1

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.omega_p, self.omega_1, self.alpha, self.epsilon)):
            raise ValueError("Invalid tongue parameters: all must be finite.")
        if self.omega_p <= 0:
            raise ValueError(f"Invalid omega_p: {self.omega_p}. Must be > 0.")
        if self.alpha == 0:
            raise ValueError("Invalid alpha: 0. The tongue slow flow needs alpha != 0.")

    def with_detuning(self, omega_1: float) -> "TongueParams":
        return TongueParams(self.omega_p, omega_1, self.alpha, self.epsilon)

    def to_dict(self) -> dict:
        return {
            "omega_p": self.omega_p,
            "omega_1": self.omega_1,
            "alpha": self.alpha,
            "epsilon": self.epsilon,
        }


@dataclass(frozen=True)
class ResonantEquilibrium:
    """
    Equilibrium (A0, psi0) of the resonant slow flow and its state-space image.

    Attributes:
        A0: Equilibrium amplitude
        psi0: Equilibrium phase in [0, 2 pi)
        x0_star: A0 cos psi0
        y0_star: Velocity -omega A0 sin psi0 (omega^3 convention)
        sine_coefficient: -A0 sin psi0, the form without the omega^3 factor
        omega: Resonant frequency
    """

    A0: float
    psi0: float
    x0_star: float
    y0_star: float
    sine_coefficient: float
    omega: float

    @property
    def state(self) -> State:
        return State(self.x0_star, self.y0_star)

    def to_dict(self) -> dict:
        return {
            "A0": self.A0,
            "psi0": self.psi0,
            "x0_star": self.x0_star,
            "y0_star": self.y0_star,
            "sine_coefficient": self.sine_coefficient,
            "omega": self.omega,
        }


@dataclass(frozen=True)
class EquilibriumEntry:
    """
    One slow-flow equilibrium with its Jacobian data.

    Attributes:
        label: 'M1' .. 'M5'
        point: Cartesian location
        phase: Canonical phase (0, pi/2, pi, 3pi/2), None at the origin
        det_j: Determinant of the Jacobian there
        trace_j: Trace of the Jacobian there (zero up to rounding)
        classification: 'center', 'saddle' or 'degenerate'
    """

    label: str
    point: CartesianSlowState
    phase: Optional[float]
    det_j: float
    trace_j: float
    classification: str

    def __post_init__(self):
        if self.classification not in CLASSIFICATIONS:
            raise ValueError(f"Invalid classification: {self.classification}")

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "M": self.point.M,
            "N": self.point.N,
            "phase": self.phase,
            "det_j": self.det_j,
            "trace_j": self.trace_j,
            "classification": self.classification,
        }


@dataclass(frozen=True)
class EquilibriumReport:
    """
    Census of first-tongue slow-flow equilibria.

    Attributes:
        params: Tongue parameters of the census
        regime: 'below-tongue', 'inside-tongue', 'above-tongue' or 'degenerate-boundary'
        convention: 'standard' (alpha < 0) or 'mirrored' (alpha > 0)
        entries: Equilibria in label order; empty on a degenerate boundary
        det_origin_printed: (4 w1^2 - 1) / (4 w_p), the origin determinant in its customary printed form
        det_origin_consistent: (4 w1^2 - 1) / (4 w_p^2), the dimensionally consistent form
    """

    params: TongueParams
    regime: str
    convention: str
    entries: List[EquilibriumEntry] = field(default_factory=list)
    det_origin_printed: float = 0.0
    det_origin_consistent: float = 0.0

    @property
    def degenerate(self) -> bool:
        return self.regime == "degenerate-boundary"

    @property
    def count(self) -> int:
        return len(self.entries)

    def labels(self) -> List[str]:
        return [e.label for e in self.entries]

    def entry(self, label: str) -> Optional[EquilibriumEntry]:
        for e in self.entries:
            if e.label == label:
                return e
        return None

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "regime": self.regime,
            "convention": self.convention,
            "degenerate": self.degenerate,
            "count": self.count,
            "entries": [e.to_dict() for e in self.entries],
            "det_origin_printed": self.det_origin_printed,
            "det_origin_consistent": self.det_origin_consistent,
        }


@dataclass(frozen=True)
class BifurcationEvent:
    """
    Change of the equilibrium census across a tongue boundary.

    Attributes:
        omega_1: Boundary value crossed (-1/2 or +1/2)
        kind: 'supercritical' (center pair born) or 'subcritical' (saddle pair born)
        count_below: Census count for omega_1 just below the boundary
        count_above: Census count just above
        born: Labels of the equilibrium pair present only on the richer side
        origin_below: Origin classification below the boundary
        origin_above: Origin classification above the boundary
    """

    omega_1: float
    kind: str
    count_below: int
    count_above: int
    born: List[str]
    origin_below: str
    origin_above: str

    def to_dict(self) -> dict:
        return {
            "omega_1": self.omega_1,
            "kind": self.kind,
            "count_below": self.count_below,
            "count_above": self.count_above,
            "born": list(self.born),
            "origin_below": self.origin_below,
            "origin_above": self.origin_above,
        }
