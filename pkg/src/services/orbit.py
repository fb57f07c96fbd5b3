"""
Periodic orbits of the full system by shooting on the period map.
"""

import logging
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from src.models.dynamics import ForcingSeries, Mat2, ModelParams, State
from src.models.errors import ConvergenceError, HypothesisError, NumericalError, SingularJacobianError
from src.models.results import AveragingPrediction, ConvergenceRow, ConvergenceStudy, PeriodicOrbit
from src.models.slow_flow import ResonantEquilibrium
from src.services.averaging import predict
from src.services.ode_core import DEFAULT_TOL, flow_with_monodromy, full_field, integrate, trajectory
from src.services.two_timing import zeroth_order_solution
from src.utils.helpers import loglog_slope, regularized_solve

logger = logging.getLogger(__name__)

DEFAULT_SHOOT_TOL = 1e-10
DEFAULT_SHOOT_MAX_ITER = 25
SHOOT_INTEGRATION_TOL = 1e-12
DEFAULT_MAX_STEP = 1.0
MAX_HALVINGS = 12
DEFAULT_SAMPLES = 200

Reference = Union[ResonantEquilibrium, Callable[[np.ndarray], np.ndarray]]


def poincare_displacement(p: ModelParams, f: ForcingSeries, z0: State, tol: float = DEFAULT_TOL,
                          fixed_steps: Optional[int] = None) -> State:
    """
    Period-map displacement phi_T(z0) - z0 with T = 2 pi / omega_p.

    Example:
        >>> p = ModelParams.resonant(1.0, epsilon=0.0)
        >>> poincare_displacement(p, ForcingSeries(), State(1.0, 0.0)).norm() < 1e-9
        True
    """
    return integrate(full_field(p, f), z0, 0.0, p.period, tol, fixed_steps) - z0


def _try_flow(p, f, z, tol, fixed_steps) -> Optional[Tuple[State, Mat2, float]]:
    try:
        z_t, monodromy = flow_with_monodromy(p, f, z, tol, fixed_steps)
    except (NumericalError, ValueError) as e:
        logger.debug("shooting: trial point rejected (%s)", e)
        return None
    return z_t, monodromy, (z_t - z).norm()


def shoot_refine(p: ModelParams, f: ForcingSeries, z_init: State, tol: float = DEFAULT_SHOOT_TOL,
                 max_iter: int = DEFAULT_SHOOT_MAX_ITER, integration_tol: float = SHOOT_INTEGRATION_TOL,
                 max_step: float = DEFAULT_MAX_STEP, fixed_steps: Optional[int] = None) -> PeriodicOrbit:
    """
    Refine an initial guess into a T-periodic orbit by Newton on phi_T(z) - z.

    The Jacobian M - I comes from the variational equation along the
    trial orbit. It is O(eps), so each step is a regularized solve, capped
    at max_step in norm, then halved until the residual decreases.

    Args:
        p: Model parameters (eps != 0)
        f: Forcing
        z_init: Starting point, typically the averaging prediction
        tol: Bound on ||phi_T(z*) - z*||
        max_iter: Newton iteration cap
        integration_tol: Tolerance of each period integration
        max_step: Trust radius of a single Newton step
        fixed_steps: RK4 steps per period instead of adaptive integration

    Returns:
        PeriodicOrbit with residual <= tol

    Raises:
        ValueError: eps = 0, where every orbit is T-periodic
        SingularJacobianError: M - I yields no step
        ConvergenceError: No convergence; carries the best iterate
    """
    if p.epsilon == 0:
        raise ValueError("Shooting needs epsilon != 0: at epsilon = 0 every orbit is T-periodic.")
    if tol <= 0:
        raise ValueError(f"Invalid tolerance: {tol}. Must be > 0.")

    z = z_init
    z_t, monodromy = flow_with_monodromy(p, f, z, integration_tol, fixed_steps)
    residual = (z_t - z).norm()

    for iteration in range(max_iter + 1):
        if residual <= tol:
            multipliers = monodromy.eigenvalues()
            logger.info("Orbit found after %d iterations: residual %.3e, max |multiplier| %.6f",
                        iteration, residual, max(abs(m) for m in multipliers))
            return PeriodicOrbit(z, p.period, residual, monodromy, multipliers, iteration, p, f)
        if iteration == max_iter:
            break

        jac = monodromy - Mat2.identity()
        displacement = (z_t - z).as_array()
        step = regularized_solve(jac.as_array(), -displacement)
        if not np.all(np.isfinite(step)) or not np.any(step):
            raise SingularJacobianError(f"Singular shooting Jacobian at ({z.x:.17g}, {z.y:.17g})", iterate=z)
        length = float(np.linalg.norm(step))
        if length > max_step:
            step *= max_step / length

        scale = 1.0
        for _ in range(MAX_HALVINGS + 1):
            candidate = State(z.x + scale * step[0], z.y + scale * step[1])
            trial = _try_flow(p, f, candidate, integration_tol, fixed_steps)
            if trial is not None and trial[2] < residual:
                break
            scale *= 0.5
        else:
            raise ConvergenceError("Shooting line search found no decrease",
                                   best=z, residual=residual, iterations=iteration)
        z = candidate
        z_t, monodromy, residual = trial
        logger.debug("shooting: iteration %d, damping %g, residual %.3e", iteration + 1, scale, residual)

    raise ConvergenceError(f"Shooting did not converge in {max_iter} iterations",
                           best=z, residual=residual, iterations=max_iter)


def sample_orbit(orbit: PeriodicOrbit, p: Optional[ModelParams] = None, f: Optional[ForcingSeries] = None,
                 samples: int = DEFAULT_SAMPLES, tol: float = SHOOT_INTEGRATION_TOL,
                 fixed_steps: Optional[int] = None) -> np.ndarray:
    """
    Sample a refined orbit at equispaced times over one period.

    fixed_steps counts RK4 steps per period, spread over the sample intervals.

    Returns:
        Array of rows (t, x, y); t runs over [0, T) without the endpoint
    """
    p = p or orbit.params
    f = f if f is not None else orbit.forcing
    if p is None or f is None:
        raise ValueError("The orbit carries no parameters; pass p and f explicitly.")
    if samples < 2:
        raise ValueError(f"Invalid samples: {samples}. Must be >= 2.")
    times = np.linspace(0.0, orbit.period, samples, endpoint=False)
    per_interval = None if fixed_steps is None else max(1, fixed_steps // samples)
    states = trajectory(full_field(p, f), orbit.z_star.as_array(), times, tol, per_interval)
    return np.column_stack([times, states])


def compare_two_timing(orbit: PeriodicOrbit, p: ModelParams, prediction: Reference,
                       samples: int = DEFAULT_SAMPLES, fixed_steps: Optional[int] = None) -> float:
    """
    Max over one period of |x_orbit(t) - x_ref(t)|.

    The reference is either a resonant equilibrium, whose zeroth-order
    solution is used, or any callable mapping an array of times to x values.
    """
    rows = sample_orbit(orbit, p, orbit.forcing, samples, fixed_steps=fixed_steps)
    times, x_orbit = rows[:, 0], rows[:, 1]
    if isinstance(prediction, ResonantEquilibrium):
        x_ref = zeroth_order_solution(prediction, prediction.omega, times)
    else:
        x_ref = np.asarray(prediction(times), dtype=float)
    return float(np.max(np.abs(x_orbit - x_ref)))


def convergence_study(p: ModelParams, f: ForcingSeries, eps_list: Sequence[float],
                      tol: float = DEFAULT_SHOOT_TOL, max_iter: int = DEFAULT_SHOOT_MAX_ITER,
                      integration_tol: float = SHOOT_INTEGRATION_TOL,
                      prediction: Optional[AveragingPrediction] = None,
                      fixed_steps: Optional[int] = None) -> ConvergenceStudy:
    """
    Distance of refined orbits to the averaging prediction as eps shrinks.

    p is a template whose epsilon is replaced by each entry of eps_list.
    A failed refinement marks its row and the study continues. fixed_steps
    switches every period integration to RK4 with that many steps.

    Raises:
        ValueError: eps_list is empty, contains 0 or is not strictly decreasing in magnitude
    """
    if not eps_list:
        raise ValueError("eps_list must not be empty.")
    magnitudes = [abs(e) for e in eps_list]
    if any(m == 0 for m in magnitudes):
        raise ValueError("eps_list must not contain 0.")
    if any(b >= a for a, b in zip(magnitudes, magnitudes[1:])):
        raise ValueError("eps_list must be strictly decreasing.")
    if prediction is None:
        if not p.is_resonant:
            raise HypothesisError("The averaging prediction needs omega_n = omega_p.")
        prediction = predict(p.omega_p, p.alpha, f.a1, f.b1)

    rows = []
    for eps in eps_list:
        params = ModelParams(p.omega_n, p.omega_p, eps, p.alpha)
        try:
            orbit = shoot_refine(params, f, prediction.state, tol, max_iter, integration_tol,
                                 fixed_steps=fixed_steps)
        except NumericalError as e:
            logger.warning("Shooting failed at epsilon = %g: %s", eps, e)
            rows.append(ConvergenceRow(eps, None, str(e)))
            continue
        error = orbit.z_star.distance(prediction.state)
        logger.debug("epsilon = %g: distance to prediction %.6e", eps, error)
        rows.append(ConvergenceRow(eps, error))

    ok = [r for r in rows if r.ok]
    slope = loglog_slope([r.epsilon for r in ok], [r.error for r in ok])
    if slope is None:
        logger.warning("Convergence slope undefined: fewer than two successful rows")
    else:
        logger.info("Convergence slope %.4f over %d rows", slope, len(ok))
    return ConvergenceStudy(rows, slope)
