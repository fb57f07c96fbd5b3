"""
Floquet stability of the linear Mathieu equation x'' + (delta + eps cos(omega_p t)) x = 0.

The monodromy matrix M over T = 2 pi / omega_p has det M = 1, so a cell
is stable when |tr M| < 2 and unstable when |tr M| > 2. A whole chart is
integrated at once with a vectorized fixed-step RK4 scheme; tongue
boundaries are located by bisection on the half-period factors of the
trace.
"""

import logging
import math
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.optimize import bisect

from src.models.chart import AxisSpec, ChartCell, ChartGrid
from src.models.dynamics import Mat2
from src.models.errors import BracketError, IntegrationError, IntegrationQualityError
from src.services.ode_core import DEFAULT_FIXED_STEPS, DEFAULT_TOL, integrate_array, integrate_fixed

logger = logging.getLogger(__name__)

DEFAULT_MARGIN = 1e-9
DET_QUALITY_TOL = 1e-6
DEFAULT_BISECT_TOL = 1e-10
HALF_PERIOD_TOL = 1e-12
FACTOR_NAMES = ("C", "S'", "S", "C'")


def hill_field(delta, epsilon, omega_p: float) -> Callable[[float, np.ndarray], np.ndarray]:
    """
    Matrix ODE of x'' + (delta + eps cos(omega_p t)) x = 0, flattened [phi11, phi12, phi21, phi22].

    delta and epsilon may be arrays; the state then has shape (4, n).
    """

    def field(t: float, phi: np.ndarray) -> np.ndarray:
        k = delta + epsilon * math.cos(math.fmod(omega_p * t, 2.0 * math.pi))
        return np.stack([phi[2], phi[3], -k * phi[0], -k * phi[1]])

    return field


def floquet_multipliers(monodromy: Mat2) -> Tuple[complex, complex]:
    """Eigenvalues of a monodromy matrix."""
    return monodromy.eigenvalues()


def classify_point(monodromy: Mat2, margin: float = DEFAULT_MARGIN) -> str:
    """
    Floquet verdict of a monodromy matrix.

    Returns 'stable' when |tr| < 2 - margin, 'unstable' when |tr| > 2 + margin,
    'boundary' otherwise.

    Raises:
        IntegrationQualityError: det(M) differs from 1 by more than 1e-6

    Example:
        >>> classify_point(Mat2.identity())
        'boundary'
    """
    drift = abs(monodromy.det - 1.0)
    if not drift <= DET_QUALITY_TOL:
        raise IntegrationQualityError(f"Monodromy determinant off by {drift:.3e}")
    size = abs(monodromy.trace)
    if size < 2.0 - margin:
        return "stable"
    if size > 2.0 + margin:
        return "unstable"
    return "boundary"


def mathieu_monodromy_batch(deltas, epsilons, omega_p: float,
                            steps: int = DEFAULT_FIXED_STEPS) -> np.ndarray:
    """
    Monodromy matrices of many (delta, eps) cells in one RK4 sweep.

    Args:
        deltas: 1-D array of delta values
        epsilons: 1-D array of eps values, same length
        omega_p: Parametric frequency
        steps: RK4 steps per period

    Returns:
        Array of shape (n, 2, 2); cells that overflowed hold non-finite entries
    """
    deltas = np.asarray(deltas, dtype=float)
    epsilons = np.asarray(epsilons, dtype=float)
    if deltas.shape != epsilons.shape or deltas.ndim != 1:
        raise ValueError("deltas and epsilons must be 1-D arrays of equal length.")
    n = deltas.size
    phi0 = np.zeros((4, n))
    phi0[0] = 1.0
    phi0[3] = 1.0
    period = 2.0 * math.pi / omega_p
    with np.errstate(over="ignore", invalid="ignore"):
        phi = integrate_fixed(hill_field(deltas, epsilons, omega_p), phi0, 0.0, period, steps, guard=False)
    return phi.T.reshape(n, 2, 2)


def _cell(delta: float, epsilon: float, matrix: np.ndarray, margin: float) -> ChartCell:
    if not np.all(np.isfinite(matrix)):
        return ChartCell(delta, epsilon, math.nan, math.nan, "failed", "non-finite monodromy")
    monodromy = Mat2.from_array(matrix)
    try:
        verdict = classify_point(monodromy, margin)
    except IntegrationQualityError as e:
        return ChartCell(delta, epsilon, monodromy.trace, monodromy.det, "failed", str(e))
    return ChartCell(delta, epsilon, monodromy.trace, monodromy.det, verdict)


def sweep_chart(delta_axis: AxisSpec, epsilon_axis: AxisSpec, omega_p: float = 2.0,
                margin: float = DEFAULT_MARGIN, tol: float = DEFAULT_TOL,
                fixed_steps: Optional[int] = DEFAULT_FIXED_STEPS) -> ChartGrid:
    """
    Ince-Strutt chart over a (delta, eps) grid.

    With fixed_steps set (the default) every cell is integrated in one
    vectorized RK4 pass; with fixed_steps=None each cell uses the adaptive
    integrator at tolerance tol. Failures are recorded in the cell.

    Returns:
        ChartGrid in row-major order, one row per eps with delta fastest
    """
    if not omega_p > 0:
        raise ValueError(f"Invalid omega_p: {omega_p}. Must be > 0.")
    eps_grid, delta_grid = np.meshgrid(epsilon_axis.values(), delta_axis.values(), indexing="ij")
    deltas, epsilons = delta_grid.ravel(), eps_grid.ravel()

    if fixed_steps is not None:
        matrices = mathieu_monodromy_batch(deltas, epsilons, omega_p, fixed_steps)
        cells = [_cell(float(d), float(e), m, margin) for d, e, m in zip(deltas, epsilons, matrices)]
    else:
        cells = []
        period = 2.0 * math.pi / omega_p
        identity = np.array([1.0, 0.0, 0.0, 1.0])
        for d, e in zip(deltas, epsilons):
            try:
                phi = integrate_array(hill_field(float(d), float(e), omega_p), identity, 0.0, period, tol)
            except IntegrationError as err:
                cells.append(ChartCell(float(d), float(e), math.nan, math.nan, "failed", str(err)))
                continue
            cells.append(_cell(float(d), float(e), phi.reshape(2, 2), margin))

    failed = sum(1 for c in cells if c.verdict == "failed")
    if failed:
        logger.warning("%d of %d chart cells failed", failed, len(cells))
    logger.info("Chart: %d x %d cells at omega_p = %g", epsilon_axis.count, delta_axis.count, omega_p)
    return ChartGrid(delta_axis, epsilon_axis, omega_p, cells)


def half_period_factors(delta: float, epsilon: float, omega_p: float, tol: float = HALF_PERIOD_TOL,
                        fixed_steps: Optional[int] = None) -> Tuple[float, float, float, float]:
    """
    Normalized even/odd solutions at T/2: (C, S', S, C').

    For the even Hill equation tr M + 2 = 4 C S' and tr M - 2 = 4 S C'.
    fixed_steps counts RK4 steps per full period T; half of them are used.
    """
    half = math.pi / omega_p
    steps = None if fixed_steps is None else max(1, fixed_steps // 2)
    phi = integrate_array(hill_field(delta, epsilon, omega_p), np.array([1.0, 0.0, 0.0, 1.0]),
                          0.0, half, tol, steps)
    c, s, dc, ds = (float(v) for v in phi)
    return c, ds, s, dc


def _bisect_factor(index: int, epsilon: float, omega_p: float, lo: float, hi: float, tol: float,
                   fixed_steps: Optional[int]) -> float:
    return bisect(lambda d: half_period_factors(d, epsilon, omega_p, fixed_steps=fixed_steps)[index],
                  lo, hi, xtol=tol)


def tongue_boundary_bisect(epsilon: float, omega_p: float, bracket: Tuple[float, float],
                           tol: float = DEFAULT_BISECT_TOL, fixed_steps: Optional[int] = None) -> float:
    """
    Locate a transition curve delta(eps) where |tr M| = 2 inside a bracket.

    Bisects the first half-period factor (C, S', S, C') that changes sign
    across the bracket, so the tongue tip at eps = 0 (where |tr| - 2 only
    touches zero) is found as well.

    Raises:
        BracketError: No factor changes sign over the bracket
    """
    lo, hi = bracket
    if not hi > lo:
        raise ValueError(f"Invalid bracket: ({lo}, {hi}).")
    at_lo = half_period_factors(lo, epsilon, omega_p, fixed_steps=fixed_steps)
    at_hi = half_period_factors(hi, epsilon, omega_p, fixed_steps=fixed_steps)
    for index, name in enumerate(FACTOR_NAMES):
        if at_lo[index] * at_hi[index] < 0:
            root = _bisect_factor(index, epsilon, omega_p, lo, hi, tol, fixed_steps)
            logger.debug("Boundary via %s at delta = %.12f (eps = %g)", name, root, epsilon)
            return root
    raise BracketError(f"No sign change of the trace factors over ({lo}, {hi}) at eps = {epsilon}")


def first_tongue_boundaries(epsilon: float, omega_p: float = 2.0, tol: float = DEFAULT_BISECT_TOL,
                            fixed_steps: Optional[int] = None) -> Tuple[float, float]:
    """
    Both boundaries of the first tongue, (delta_minus, delta_plus).

    C and S' each vanish on one boundary; both are bisected over a bracket
    around the tip omega_p^2 / 4 seeded from the analytic width.
    """
    tip = omega_p ** 2 / 4.0
    width = 2.0 * abs(epsilon) + 0.1 * tip
    roots: List[float] = []
    for index in (0, 1):
        lo, hi = tip - width, tip + width
        f_lo = half_period_factors(lo, epsilon, omega_p, fixed_steps=fixed_steps)[index]
        f_hi = half_period_factors(hi, epsilon, omega_p, fixed_steps=fixed_steps)[index]
        if f_lo * f_hi >= 0:
            raise BracketError(f"Factor {FACTOR_NAMES[index]} keeps its sign over ({lo}, {hi})")
        roots.append(_bisect_factor(index, epsilon, omega_p, lo, hi, tol, fixed_steps))
    lower, upper = sorted(roots)
    return lower, upper
