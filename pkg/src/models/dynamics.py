"""
Value types of the forced Mathieu-Duffing system.

This module defines the parameter set, the truncated forcing series, the
planar phase point and the 2x2 matrix type shared by every service.
"""

import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np


@dataclass(frozen=True)
class ModelParams:
    """
    Scalar parameters of x'' + (omega_n^2 + eps cos(omega_p t)) x + eps alpha x^3 = eps f(t).

    Attributes:
        omega_n: Natural frequency (rad per unit time, > 0)
        omega_p: Parametric frequency (rad per unit time, > 0)
        epsilon: Perturbation size
        alpha: Cubic stiffness

    Example:
        >>> p = ModelParams.resonant(omega=1.0, epsilon=0.01, alpha=1.0)
        >>> p.is_resonant
        True
        >>> round(p.period, 6)
        6.283185
    """

    omega_n: float = 1.0
    omega_p: float = 1.0
    epsilon: float = 0.0
    alpha: float = 1.0

    def __post_init__(self):
        """Validate the frequency invariants."""
        for name in ("omega_n", "omega_p", "epsilon", "alpha"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"Invalid {name}: {value}. Must be finite.")
        if self.omega_n <= 0:
            raise ValueError(f"Invalid omega_n: {self.omega_n}. Must be > 0.")
        if self.omega_p <= 0:
            raise ValueError(f"Invalid omega_p: {self.omega_p}. Must be > 0.")

    @classmethod
    def resonant(cls, omega: float, epsilon: float = 0.0, alpha: float = 1.0) -> "ModelParams":
        """
        Build the resonant case omega_n = omega_p = omega.

        Args:
            omega: Common frequency
            epsilon: Perturbation size
            alpha: Cubic stiffness

        Returns:
            New ModelParams instance
        """
        return cls(omega_n=omega, omega_p=omega, epsilon=epsilon, alpha=alpha)

    @property
    def is_resonant(self) -> bool:
        """True when omega_n equals omega_p (to 1e-12 relative)."""
        return math.isclose(self.omega_n, self.omega_p, rel_tol=1e-12, abs_tol=0.0)

    @property
    def period(self) -> float:
        """Forcing period T = 2 pi / omega_p."""
        return 2.0 * math.pi / self.omega_p

    @property
    def delta(self) -> float:
        """Linear stiffness omega_n^2."""
        return self.omega_n ** 2

    def to_dict(self) -> dict:
        return {
            "omega_n": self.omega_n,
            "omega_p": self.omega_p,
            "epsilon": self.epsilon,
            "alpha": self.alpha,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ModelParams":
        return cls(**data)


@dataclass(frozen=True)
class ForcingSeries:
    """
    Zero-mean truncated Fourier series f(t) = sum_n a_n cos(n w t) + b_n sin(n w t).

    Index 0 of each list is harmonic 1; there is no constant term, so the
    series has zero mean over one period by construction. The shorter list
    is padded with zeros.

    Attributes:
        a: Cosine coefficients a_1..a_N
        b: Sine coefficients b_1..b_N

    Example:
        >>> f = ForcingSeries(a=[0.0, 1.0])
        >>> f.harmonics
        2
        >>> f.b
        (0.0, 0.0)
    """

    a: Tuple[float, ...] = field(default_factory=tuple)
    b: Tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        """Normalize both coefficient lists to tuples of equal length."""
        a = tuple(float(v) for v in self.a)
        b = tuple(float(v) for v in self.b)
        if not all(math.isfinite(v) for v in a + b):
            raise ValueError("Invalid forcing coefficients: all must be finite.")
        n = max(len(a), len(b))
        object.__setattr__(self, "a", a + (0.0,) * (n - len(a)))
        object.__setattr__(self, "b", b + (0.0,) * (n - len(b)))

    @classmethod
    def first_harmonic(cls, a1: float, b1: float = 0.0) -> "ForcingSeries":
        """Series with a single harmonic a1 cos(wt) + b1 sin(wt)."""
        return cls(a=(a1,), b=(b1,))

    @property
    def harmonics(self) -> int:
        """Number of harmonics N."""
        return len(self.a)

    @property
    def a1(self) -> float:
        return self.a[0] if self.a else 0.0

    @property
    def b1(self) -> float:
        return self.b[0] if self.b else 0.0

    @property
    def has_first_harmonic(self) -> bool:
        """True when (a1, b1) != (0, 0), the hypothesis of the existence results."""
        return self.a1 != 0.0 or self.b1 != 0.0

    def to_dict(self) -> dict:
        return {"a": list(self.a), "b": list(self.b)}

    @classmethod
    def from_dict(cls, data: dict) -> "ForcingSeries":
        return cls(a=tuple(data.get("a", ())), b=tuple(data.get("b", ())))


@dataclass(frozen=True)
class State:
    """
    Planar phase point (x, y) = (position, velocity).

    Example:
        >>> s = State(3.0, 4.0)
        >>> s.norm()
        5.0
    """

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"Invalid state: ({self.x}, {self.y}). Both entries must be finite.")

    @classmethod
    def from_array(cls, values) -> "State":
        return cls(float(values[0]), float(values[1]))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def distance(self, other: "State") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def __add__(self, other: "State") -> "State":
        return State(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "State") -> "State":
        return State(self.x - other.x, self.y - other.y)

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y}


@dataclass(frozen=True)
class Mat2:
    """
    Real 2x2 matrix [[m11, m12], [m21, m22]].

    Holds fundamental, monodromy and Jacobian matrices. Determinant and
    trace are computed directly from the entries.

    Example:
        >>> m = Mat2(0.0, -1.0, 1.0, 0.0)
        >>> m.det
        1.0
        >>> m.trace
        0.0
    """

    m11: float
    m12: float
    m21: float
    m22: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.m11, self.m12, self.m21, self.m22)):
            raise ValueError("Invalid matrix: all entries must be finite.")

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_array(cls, values) -> "Mat2":
        arr = np.asarray(values, dtype=float).reshape(2, 2)
        return cls(float(arr[0, 0]), float(arr[0, 1]), float(arr[1, 0]), float(arr[1, 1]))

    def as_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]], dtype=float)

    @property
    def det(self) -> float:
        return self.m11 * self.m22 - self.m12 * self.m21

    @property
    def trace(self) -> float:
        return self.m11 + self.m22

    def eigenvalues(self) -> Tuple[complex, complex]:
        """Both eigenvalues, ordered by decreasing real part then imaginary part."""
        values = sorted(np.linalg.eigvals(self.as_array()).astype(complex),
                        key=lambda z: (-z.real, -z.imag))
        return complex(values[0]), complex(values[1])

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2.from_array(self.as_array() @ other.as_array())

    def __sub__(self, other: "Mat2") -> "Mat2":
        return Mat2(self.m11 - other.m11, self.m12 - other.m12,
                    self.m21 - other.m21, self.m22 - other.m22)

    def to_dict(self) -> dict:
        return {"m11": self.m11, "m12": self.m12, "m21": self.m21, "m22": self.m22}

    def to_rows(self) -> List[List[float]]:
        return [[self.m11, self.m12], [self.m21, self.m22]]
