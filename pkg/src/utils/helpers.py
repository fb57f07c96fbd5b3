"""
Small numerical helpers shared by the services.
"""

import math
from typing import Optional, Sequence

import numpy as np

TIKHONOV_FLOOR = 1e-14


def regularized_solve(matrix: np.ndarray, rhs: np.ndarray, floor: float = TIKHONOV_FLOOR) -> np.ndarray:
    """
    Solve matrix @ x = rhs, falling back to a Tikhonov pseudo-solve.

    A well-conditioned matrix is solved directly. Otherwise the normal
    equations (A^T A + mu I) x = A^T b are solved with
    mu = floor * max(1, ||A||_F^2). A zero matrix yields a zero step.

    Args:
        matrix: Square coefficient matrix
        rhs: Right-hand side
        floor: Regularization floor

    Returns:
        Solution vector

    Example:
        >>> regularized_solve(np.eye(2), np.array([1.0, 2.0])).tolist()
        [1.0, 2.0]
    """
    a = np.asarray(matrix, dtype=float)
    b = np.asarray(rhs, dtype=float)
    singular_values = np.linalg.svd(a, compute_uv=False)
    if singular_values[-1] > singular_values[0] * np.finfo(float).eps ** 0.5:
        return np.linalg.solve(a, b)
    mu = floor * max(1.0, float(np.sum(a * a)))
    return np.linalg.solve(a.T @ a + mu * np.eye(a.shape[0]), a.T @ b)


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> Optional[float]:
    """
    Least-squares exponent p of y ~ C x^p.

    Uses |x|; returns None with fewer than two usable points (x != 0, y > 0).

    Example:
        >>> round(loglog_slope([1.0, 2.0, 4.0], [3.0, 6.0, 12.0]), 12)
        1.0
    """
    pairs = [(x, y) for x, y in zip(xs, ys) if x != 0 and y is not None and y > 0]
    if len(pairs) < 2:
        return None
    lx = np.log([abs(p[0]) for p in pairs])
    ly = np.log([p[1] for p in pairs])
    return float(np.polyfit(lx, ly, 1)[0])


def format_float(value: Optional[float]) -> str:
    """
    Serialize a float with 17 significant digits; None becomes an empty field.

    Example:
        >>> format_float(0.1)
        '0.10000000000000001'
        >>> format_float(None)
        ''
    """
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if math.isnan(value):
        return "nan"
    return format(float(value), ".17g")
