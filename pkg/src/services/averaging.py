"""
First-order averaging for the resonant forced Mathieu-Duffing system.

In the resonant case omega_n = omega_p = omega the system reads
x' = y, y' = -omega^2 x + eps (f(t) - alpha x^3 - cos(omega t) x), a
perturbation of the harmonic oscillator. The averaged (bifurcation)
function

    f1(z) = integral_0^T Y^-1(t) F1(t, Y(t) z) dt

has a simple zero for every (a1, b1) != (0, 0) and alpha != 0; each
simple zero continues to a T-periodic orbit for small eps.
"""

import logging
import math
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from src.models.dynamics import ForcingSeries, Mat2, ModelParams, State
from src.models.errors import ConvergenceError, HypothesisError, SingularJacobianError
from src.models.results import AveragingPrediction, BifurcationValue
from src.services.ode_core import eval_forcing, unperturbed_flow_closed
from src.utils.helpers import regularized_solve

logger = logging.getLogger(__name__)

DEFAULT_QUAD_POINTS = 2048
MIN_QUAD_POINTS = 64
DEFAULT_NEWTON_TOL = 1e-12
DEFAULT_MAX_ITER = 50
MAX_HALVINGS = 30
FD_STEP = 1e-6

Perturbation = Callable[[np.ndarray, np.ndarray, np.ndarray], Tuple[np.ndarray, np.ndarray]]
Objective = Callable[[State], BifurcationValue]


def _check_omega(omega: float) -> None:
    if not omega > 0:
        raise ValueError(f"Invalid omega: {omega}. Must be > 0.")


def fundamental_matrix(omega: float, t: float) -> Mat2:
    """
    Fundamental matrix Y(t) = [[cos wt, sin wt / w], [-w sin wt, cos wt]] of x'' + w^2 x = 0.

    Example:
        >>> fundamental_matrix(1.0, 0.0) == Mat2.identity()
        True
    """
    _check_omega(omega)
    phase = math.fmod(omega * t, 2.0 * math.pi)
    c, s = math.cos(phase), math.sin(phase)
    return Mat2(c, s / omega, -omega * s, c)


def fundamental_matrix_inverse(omega: float, t: float) -> Mat2:
    """
    Inverse Y^-1(t) = [[cos wt, -sin wt / w], [w sin wt, cos wt]].

    Example:
        >>> m = fundamental_matrix_inverse(1.0, math.pi / 2)
        >>> [round(v, 12) for v in (m.m11, m.m12, m.m21, m.m22)]
        [0.0, -1.0, 1.0, 0.0]
    """
    _check_omega(omega)
    phase = math.fmod(omega * t, 2.0 * math.pi)
    c, s = math.cos(phase), math.sin(phase)
    return Mat2(c, -s / omega, omega * s, c)


def bifurcation_fn_closed(omega: float, alpha: float, a1: float, b1: float, z0: State) -> BifurcationValue:
    """
    Closed-form bifurcation function of the resonant system.

    f11 = -pi b1 / w^2 + 3 pi alpha y0 (w^2 x0^2 + y0^2) / (4 w^5)
    f21 =  pi a1 / w   - 3 pi alpha x0 (w^2 x0^2 + y0^2) / (4 w^3)

    Only the first forcing harmonic and the cubic term contribute; the
    parametric term averages to zero.
    """
    _check_omega(omega)
    x0, y0 = z0.x, z0.y
    energy = omega ** 2 * x0 ** 2 + y0 ** 2
    f11 = -math.pi * b1 / omega ** 2 + 3.0 * math.pi * alpha * y0 * energy / (4.0 * omega ** 5)
    f21 = math.pi * a1 / omega - 3.0 * math.pi * alpha * x0 * energy / (4.0 * omega ** 3)
    return BifurcationValue(f11, f21)


def averaged_function(perturbation: Perturbation, omega: float, z0: State,
                      quad_points: int = DEFAULT_QUAD_POINTS) -> BifurcationValue:
    """
    Average a planar perturbation of x'' + w^2 x = 0 along the unperturbed orbit from z0.

    Evaluates integral_0^T Y^-1(t) F1(t, u(t)) dt with u(t) = Y(t) z0 by
    the composite trapezoid rule on [0, T], which for periodic integrands
    reduces to an equally weighted sum over quad_points nodes.

    Args:
        perturbation: F1(t, x, y) -> (g1, g2), vectorized over arrays
        omega: Frequency w of the unperturbed oscillator
        z0: Initial state (x0, y0)
        quad_points: Number of quadrature nodes (>= 64)

    Returns:
        Both components of the averaged function
    """
    _check_omega(omega)
    if quad_points < MIN_QUAD_POINTS:
        raise ValueError(f"Invalid quad_points: {quad_points}. Must be >= {MIN_QUAD_POINTS}.")
    period = 2.0 * math.pi / omega
    t = np.linspace(0.0, period, quad_points, endpoint=False)
    phase = np.mod(omega * t, 2.0 * math.pi)
    c, s = np.cos(phase), np.sin(phase)
    x = (omega * z0.x * c + z0.y * s) / omega
    y = -omega * z0.x * s + z0.y * c
    g1, g2 = perturbation(t, x, y)
    g1 = np.broadcast_to(np.asarray(g1, dtype=float), t.shape)
    g2 = np.broadcast_to(np.asarray(g2, dtype=float), t.shape)
    weight = period / quad_points
    f11 = weight * float(np.sum(c * g1 - s * g2 / omega))
    f21 = weight * float(np.sum(omega * s * g1 + c * g2))
    return BifurcationValue(f11, f21)


def _require_resonant(p: ModelParams) -> float:
    if not p.is_resonant:
        raise HypothesisError(
            f"Averaging needs the resonant case omega_n = omega_p, got {p.omega_n} and {p.omega_p}."
        )
    return p.omega_p


def partial_integrals(p: ModelParams, f: ForcingSeries, z0: State,
                      quad_points: int = DEFAULT_QUAD_POINTS
                      ) -> Tuple[BifurcationValue, BifurcationValue, BifurcationValue]:
    """
    Split the averaged function into forcing, cubic and parametric parts.

    Returns (M1, M2, M3) with f1 = M1 - M2 - M3, where M1 averages (0, f(t)),
    M2 averages (0, alpha x^3) and M3 averages (0, cos(wt) x).
    """
    omega = _require_resonant(p)
    alpha = p.alpha
    m1 = averaged_function(lambda t, x, y: (0.0, eval_forcing(f, omega, t)), omega, z0, quad_points)
    m2 = averaged_function(lambda t, x, y: (0.0, alpha * x ** 3), omega, z0, quad_points)
    m3 = averaged_function(
        lambda t, x, y: (0.0, np.cos(np.mod(omega * t, 2.0 * math.pi)) * x), omega, z0, quad_points
    )
    return m1, m2, m3


def bifurcation_fn_quadrature(p: ModelParams, f: ForcingSeries, z0: State,
                              quad_points: int = DEFAULT_QUAD_POINTS) -> BifurcationValue:
    """
    Bifurcation function by quadrature, for any forcing series.

    Raises:
        HypothesisError: omega_n != omega_p
        ValueError: quad_points < 64
    """
    m1, m2, m3 = partial_integrals(p, f, z0, quad_points)
    return m1 - m2 - m3


def _validate_hypotheses(alpha: float, a1: float, b1: float) -> None:
    if alpha == 0:
        raise HypothesisError("alpha = 0: the averaged function has no isolated zero.")
    if a1 == 0 and b1 == 0:
        raise HypothesisError("a1 = b1 = 0: the forcing has no first harmonic.")


def _convention_zero(omega: float, alpha: float, a1: float, b1: float, sign: float) -> State:
    denom = 3.0 * alpha * (a1 ** 2 + b1 ** 2)
    x0 = float(np.cbrt(4.0 * a1 ** 3 / denom))
    y0 = float(np.cbrt(4.0 * b1 ** 3 * omega ** 3 / denom))
    return State(sign * x0, sign * y0)


def sign_convention_residuals(omega: float, alpha: float, a1: float, b1: float) -> Dict[str, float]:
    """
    Residual norm of the closed-form zero under both sign conventions.

    The 'positive' convention takes the real cube roots as they are, the
    'negative' one negates both components.
    """
    _check_omega(omega)
    _validate_hypotheses(alpha, a1, b1)
    return {
        name: bifurcation_fn_closed(omega, alpha, a1, b1, _convention_zero(omega, alpha, a1, b1, sign)).norm()
        for name, sign in (("positive", 1.0), ("negative", -1.0))
    }


def _best_convention(omega: float, alpha: float, a1: float, b1: float) -> Tuple[str, State, Dict[str, float]]:
    residuals = sign_convention_residuals(omega, alpha, a1, b1)
    name = min(residuals, key=lambda k: (residuals[k], k != "positive"))
    sign = 1.0 if name == "positive" else -1.0
    return name, _convention_zero(omega, alpha, a1, b1, sign), residuals


def predicted_zero(omega: float, alpha: float, a1: float, b1: float) -> Tuple[float, float]:
    """
    Closed-form zero (x0*, y0*) of the bifurcation function.

    x0* = cbrt(4 a1^3 / (3 alpha (a1^2 + b1^2))),
    y0* = cbrt(4 b1^3 w^3 / (3 alpha (a1^2 + b1^2))),
    with real cube roots; of the two sign conventions the one with the
    smaller residual is returned.

    Raises:
        HypothesisError: alpha = 0 or a1 = b1 = 0

    Example:
        >>> x0, y0 = predicted_zero(1.0, 1.0, 1.0, 0.0)
        >>> round(x0, 5), y0
        (1.10064, 0.0)
    """
    _, zero, _ = _best_convention(omega, alpha, a1, b1)
    return zero.x, zero.y


def averaging_jacobian(omega: float, alpha: float, z0: State) -> Mat2:
    """Analytic Jacobian of (f11, f21) with respect to (x0, y0)."""
    _check_omega(omega)
    x0, y0 = z0.x, z0.y
    k = 3.0 * math.pi * alpha
    return Mat2(
        k * x0 * y0 / (2.0 * omega ** 3),
        k * (omega ** 2 * x0 ** 2 + 3.0 * y0 ** 2) / (4.0 * omega ** 5),
        -k * (3.0 * omega ** 2 * x0 ** 2 + y0 ** 2) / (4.0 * omega ** 3),
        -k * x0 * y0 / (2.0 * omega ** 3),
    )


def jacobian_det_closed(omega: float, alpha: float, z0: State) -> float:
    """
    Closed-form determinant 27 pi^2 alpha^2 (y0^2 + w^2 x0^2)^2 / (16 w^8).

    Example:
        >>> round(jacobian_det_closed(1.0, 1.0, State(1.0, 0.0)), 10) == round(27 * math.pi ** 2 / 16, 10)
        True
    """
    _check_omega(omega)
    energy = z0.y ** 2 + omega ** 2 * z0.x ** 2
    return 27.0 * math.pi ** 2 * alpha ** 2 * energy ** 2 / (16.0 * omega ** 8)


def finite_difference_jacobian(objective: Objective, z: State, h: float = FD_STEP) -> Mat2:
    """Central-difference Jacobian of a planar map."""
    fxp = objective(State(z.x + h, z.y))
    fxm = objective(State(z.x - h, z.y))
    fyp = objective(State(z.x, z.y + h))
    fym = objective(State(z.x, z.y - h))
    return Mat2(
        (fxp.f11 - fxm.f11) / (2 * h), (fyp.f11 - fym.f11) / (2 * h),
        (fxp.f21 - fxm.f21) / (2 * h), (fyp.f21 - fym.f21) / (2 * h),
    )


def newton_root(objective: Objective, guess: State, tol: float = DEFAULT_NEWTON_TOL,
                max_iter: int = DEFAULT_MAX_ITER,
                jacobian: Optional[Callable[[State], Mat2]] = None) -> State:
    """
    Damped Newton iteration for a zero of a planar map.

    Each step solves J d = -F with a Tikhonov fallback for ill-conditioned
    J, then halves d (at most 30 times) until the residual decreases.

    Args:
        objective: Map z -> BifurcationValue
        guess: Starting point
        tol: Residual tolerance (> 0)
        max_iter: Iteration cap
        jacobian: Analytic Jacobian; central differences when omitted

    Returns:
        z with ||objective(z)|| <= tol

    Raises:
        SingularJacobianError: The Jacobian produces no step
        ConvergenceError: Cap reached or no decrease along the step; carries the best iterate
    """
    if tol <= 0:
        raise ValueError(f"Invalid tolerance: {tol}. Must be > 0.")
    z = guess
    residual = objective(z).norm()
    for iteration in range(max_iter):
        if residual <= tol:
            logger.debug("newton: converged after %d iterations, residual %.3e", iteration, residual)
            return z
        value = objective(z)
        jac = jacobian(z) if jacobian is not None else finite_difference_jacobian(objective, z)
        step = regularized_solve(jac.as_array(), -np.array(value.as_tuple()))
        if not np.all(np.isfinite(step)) or not np.any(step):
            raise SingularJacobianError(f"Singular Jacobian at ({z.x:.17g}, {z.y:.17g})", iterate=z)

        scale = 1.0
        for _ in range(MAX_HALVINGS + 1):
            candidate = State(z.x + scale * step[0], z.y + scale * step[1])
            candidate_residual = objective(candidate).norm()
            if candidate_residual < residual:
                break
            scale *= 0.5
        else:
            raise ConvergenceError("Line search found no decrease", best=z, residual=residual,
                                   iterations=iteration)
        z, residual = candidate, candidate_residual
        logger.debug("newton: iteration %d, damping %g, residual %.3e", iteration + 1, scale, residual)

    if residual <= tol:
        return z
    raise ConvergenceError(f"Newton did not converge in {max_iter} iterations",
                           best=z, residual=residual, iterations=max_iter)


def predict(omega: float, alpha: float, a1: float, b1: float,
            tolerance: float = 1e-10) -> AveragingPrediction:
    """
    Full averaging prediction: zero, Jacobian determinant, residual and convention scores.

    Args:
        omega: Resonant frequency
        alpha: Cubic stiffness (!= 0)
        a1: First cosine coefficient
        b1: First sine coefficient
        tolerance: Residual bound for the verified flag

    Returns:
        AveragingPrediction
    """
    name, zero, residuals = _best_convention(omega, alpha, a1, b1)
    if name != "positive":
        logger.warning("Negative cube-root convention scored lower (%s)", residuals)
    prediction = AveragingPrediction(
        x0_star=zero.x,
        y0_star=zero.y,
        det_jacobian=jacobian_det_closed(omega, alpha, zero),
        residual_norm=residuals[name],
        tolerance=tolerance,
        sign_convention=name,
        convention_residuals=residuals,
    )
    if not prediction.verified:
        logger.warning("Prediction residual %.3e exceeds %.1e", prediction.residual_norm, tolerance)
    return prediction


def predicted_orbit(prediction: AveragingPrediction, omega: float, t: float) -> State:
    """
    Limit orbit of the existence result: the unperturbed flow from (x0*, y0*).

    x(t) = x0* cos wt + (y0* / w) sin wt.
    """
    return unperturbed_flow_closed(ModelParams.resonant(omega), prediction.state, t)


def wallis_integral(n: int) -> float:
    """
    integral_0^{pi/2} sin^n(t) dt = (n-1)!! / n!!, times pi/2 when n is even.

    Example:
        >>> wallis_integral(2) == math.pi / 4
        True
        >>> wallis_integral(3)
        0.6666666666666666
    """
    if n < 0:
        raise ValueError(f"Invalid exponent: {n}. Must be >= 0.")
    ratio = math.prod(range(n - 1, 0, -2)) / math.prod(range(n, 0, -2))
    return ratio * math.pi / 2 if n % 2 == 0 else ratio
