"""
Stability-chart types.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

VERDICTS = ("stable", "unstable", "boundary", "failed")


@dataclass(frozen=True)
class AxisSpec:
    """
    Evenly spaced axis (min, max, count), strictly increasing.

    Example:
        >>> AxisSpec(0.0, 1.0, 3).values().tolist()
        [0.0, 0.5, 1.0]
    """

    min: float
    max: float
    count: int

    def __post_init__(self):
        if not (math.isfinite(self.min) and math.isfinite(self.max)):
            raise ValueError("Invalid axis: bounds must be finite.")
        if self.count < 2:
            raise ValueError(f"Invalid axis count: {self.count}. Must be >= 2.")
        if not self.max > self.min:
            raise ValueError(f"Invalid axis: max ({self.max}) must exceed min ({self.min}).")

    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.count)

    def to_dict(self) -> dict:
        return {"min": self.min, "max": self.max, "count": self.count}

    @classmethod
    def from_dict(cls, data: dict) -> "AxisSpec":
        return cls(float(data["min"]), float(data["max"]), int(data["count"]))


@dataclass(frozen=True)
class ChartCell:
    """
    Floquet verdict of one (delta, epsilon) point.

    Attributes:
        delta: omega_n^2
        epsilon: Parametric amplitude
        trace: Monodromy trace
        det: Monodromy determinant
        verdict: 'stable', 'unstable', 'boundary', or 'failed' when error is set
        error: Integration failure message, None on success
    """

    delta: float
    epsilon: float
    trace: float
    det: float
    verdict: str
    error: Optional[str] = None

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"Invalid verdict: {self.verdict}")
        if (self.verdict == "failed") != (self.error is not None):
            raise ValueError("A failed cell must carry an error message, and only a failed cell.")

    @property
    def det_ok(self) -> bool:
        """Quality flag: Liouville determinant within 1e-9 of 1."""
        return math.isfinite(self.det) and abs(self.det - 1.0) <= 1e-9


@dataclass(frozen=True)
class ChartGrid:
    """
    Row-major Ince-Strutt chart: one row per epsilon, delta varying fastest.

    Attributes:
        delta_axis: Axis of omega_n^2 values
        epsilon_axis: Axis of epsilon values
        omega_p: Parametric frequency of the chart
        cells: len = delta_axis.count * epsilon_axis.count
    """

    delta_axis: AxisSpec
    epsilon_axis: AxisSpec
    omega_p: float
    cells: List[ChartCell] = field(default_factory=list)

    def __post_init__(self):
        expected = self.delta_axis.count * self.epsilon_axis.count
        if len(self.cells) != expected:
            raise ValueError(f"Chart has {len(self.cells)} cells, expected {expected}.")

    def cell(self, row: int, col: int) -> ChartCell:
        return self.cells[row * self.delta_axis.count + col]

    def row(self, row: int) -> List[ChartCell]:
        start = row * self.delta_axis.count
        return self.cells[start:start + self.delta_axis.count]

    def metadata(self) -> dict:
        return {
            "axes": {"x": "delta = omega_n^2", "y": "epsilon"},
            "order": "row-major, one row per epsilon, delta fastest",
            "delta": self.delta_axis.to_dict(),
            "epsilon": self.epsilon_axis.to_dict(),
            "omega_p": self.omega_p,
            "period": 2.0 * math.pi / self.omega_p,
        }
