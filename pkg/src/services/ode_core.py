"""
Vector fields, time integration, flow maps and monodromy matrices.

The full system is x'' + (omega_n^2 + eps cos(omega_p t)) x + eps alpha x^3 = eps f(t),
written as the planar system x' = y, y' = -omega_n^2 x + eps (f(t) - alpha x^3 - cos(omega_p t) x).

Integration uses an embedded Dormand-Prince 5(4) pair with PI step control,
or a fixed-step classical RK4 scheme when reproducibility across platforms
matters more than adaptivity.
"""

import logging
import math
from typing import Callable, Optional, Tuple

import numpy as np

from src.models.dynamics import ForcingSeries, Mat2, ModelParams, State
from src.models.errors import IntegrationError

logger = logging.getLogger(__name__)

VectorField = Callable[[float, np.ndarray], np.ndarray]

TWO_PI = 2.0 * math.pi
DEFAULT_TOL = 1e-10
DEFAULT_FIXED_STEPS = 4000
BLOWUP_LIMIT = 1e8
MAX_STEPS = 200_000
MONODROMY_MODES = ("linear-mathieu", "linearized-about-orbit")

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
# b - b_hat, local error estimate of the embedded 4th-order solution
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_PI_BETA1 = 0.7 / 5
_PI_BETA2 = 0.4 / 5


def _phase(arg):
    """Reduce a trigonometric argument modulo 2 pi."""
    return np.mod(arg, TWO_PI)


def forcing_evaluator(f: ForcingSeries, omega: float) -> Callable[[float], float]:
    """
    Build a fast scalar evaluator of the forcing series.

    Args:
        f: Forcing series
        omega: Fundamental frequency

    Returns:
        Callable t -> f(t)
    """
    if omega <= 0:
        raise ValueError(f"Invalid forcing frequency: {omega}. Must be > 0.")
    if f.harmonics == 0:
        return lambda t: 0.0
    a = np.asarray(f.a)
    b = np.asarray(f.b)
    n_omega = omega * np.arange(1, f.harmonics + 1)

    def evaluate(t: float) -> float:
        phase = _phase(n_omega * t)
        return float(np.dot(a, np.cos(phase)) + np.dot(b, np.sin(phase)))

    return evaluate


def eval_forcing(f: ForcingSeries, omega: float, t):
    """
    Evaluate f(t) = sum_n a_n cos(n omega t) + b_n sin(n omega t).

    Each argument n omega t is reduced modulo 2 pi before evaluation.
    Accepts a scalar time or an array of times.

    Args:
        f: Forcing series
        omega: Fundamental frequency (> 0)
        t: Time or array of times

    Returns:
        Forcing value(s); 0 for an empty series

    Example:
        >>> eval_forcing(ForcingSeries(a=[1.0], b=[0.0]), 1.0, 0.0)
        1.0
    """
    if omega <= 0:
        raise ValueError(f"Invalid forcing frequency: {omega}. Must be > 0.")
    times = np.asarray(t, dtype=float)
    if f.harmonics == 0:
        return 0.0 if times.ndim == 0 else np.zeros_like(times)
    n = np.arange(1, f.harmonics + 1)
    phase = _phase(np.multiply.outer(times, n * omega))
    values = np.cos(phase) @ np.asarray(f.a) + np.sin(phase) @ np.asarray(f.b)
    return float(values) if times.ndim == 0 else values


def rhs_full(p: ModelParams, f: ForcingSeries, t: float, s: State) -> State:
    """
    Right-hand side (y, -omega_n^2 x + eps (f(t) - alpha x^3 - cos(omega_p t) x)).

    Example:
        >>> p = ModelParams.resonant(1.0, epsilon=0.1, alpha=1.0)
        >>> rhs_full(p, ForcingSeries(a=[1.0]), 0.0, State(1.0, 0.0)).y
        -1.1
    """
    x, y = s.x, s.y
    forcing = eval_forcing(f, p.omega_p, t)
    parametric = math.cos(_phase(p.omega_p * t))
    return State(y, -p.omega_n ** 2 * x + p.epsilon * (forcing - p.alpha * x ** 3 - parametric * x))


def rhs_unperturbed(p: ModelParams, s: State) -> State:
    """Right-hand side (y, -omega_n^2 x) of the unperturbed oscillator."""
    return State(s.y, -p.omega_n ** 2 * s.x)


def unperturbed_flow_closed(p: ModelParams, z0: State, t: float) -> State:
    """
    Closed-form flow of x' = y, y' = -w^2 x with w = omega_n.

    Returns ((w x0 cos wt + y0 sin wt) / w, -w x0 sin wt + y0 cos wt).
    """
    w = p.omega_n
    phase = _phase(w * t)
    c, s = math.cos(phase), math.sin(phase)
    return State((w * z0.x * c + z0.y * s) / w, -w * z0.x * s + z0.y * c)


def full_field(p: ModelParams, f: ForcingSeries) -> VectorField:
    """Array form of rhs_full for the integrators."""
    forcing = forcing_evaluator(f, p.omega_p)
    wn2, wp, eps, alpha = p.omega_n ** 2, p.omega_p, p.epsilon, p.alpha

    def field(t: float, z: np.ndarray) -> np.ndarray:
        x, y = z[0], z[1]
        c = math.cos(_phase(wp * t))
        return np.array([y, -wn2 * x + eps * (forcing(t) - alpha * x ** 3 - c * x)])

    return field


def unperturbed_field(p: ModelParams) -> VectorField:
    """Array form of rhs_unperturbed."""
    wn2 = p.omega_n ** 2

    def field(t: float, z: np.ndarray) -> np.ndarray:
        return np.array([z[1], -wn2 * z[0]])

    return field


def mathieu_variational_field(p: ModelParams) -> VectorField:
    """
    Matrix ODE Phi' = [[0, 1], [-(omega_n^2 + eps cos(omega_p t)), 0]] Phi.

    Phi is flattened row-major as [phi11, phi12, phi21, phi22].
    """
    wn2, wp, eps = p.omega_n ** 2, p.omega_p, p.epsilon

    def field(t: float, phi: np.ndarray) -> np.ndarray:
        k = wn2 + eps * math.cos(_phase(wp * t))
        return np.array([phi[2], phi[3], -k * phi[0], -k * phi[1]])

    return field


def orbit_variational_field(p: ModelParams, f: ForcingSeries) -> VectorField:
    """
    Full system augmented with its variational equation.

    State layout: [x, y, phi11, phi12, phi21, phi22]; the linear part is
    [[0, 1], [-(omega_n^2 + eps cos(omega_p t) + 3 eps alpha x^2), 0]].
    """
    forcing = forcing_evaluator(f, p.omega_p)
    wn2, wp, eps, alpha = p.omega_n ** 2, p.omega_p, p.epsilon, p.alpha

    def field(t: float, w: np.ndarray) -> np.ndarray:
        x, y = w[0], w[1]
        c = math.cos(_phase(wp * t))
        k = wn2 + eps * c + 3.0 * eps * alpha * x * x
        return np.array([
            y,
            -wn2 * x + eps * (forcing(t) - alpha * x ** 3 - c * x),
            w[4], w[5], -k * w[2], -k * w[3],
        ])

    return field


def _rms(values: np.ndarray) -> float:
    return float(np.sqrt(np.mean(values * values)))


def _initial_step(field: VectorField, t0: float, y0: np.ndarray, f0: np.ndarray,
                  rtol: float, atol: float, span: float) -> float:
    """Starting step from the local Lipschitz estimate (Hairer, Norsett & Wanner)."""
    scale = atol + rtol * np.abs(y0)
    d0 = _rms(y0 / scale)
    d1 = _rms(f0 / scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    f1 = field(t0 + h0, y0 + h0 * f0)
    d2 = _rms((f1 - f0) / scale) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, span)


def _check_state(y: np.ndarray, t: float, blowup: float) -> None:
    if not np.all(np.isfinite(y)):
        raise IntegrationError("Non-finite state", t)
    if np.max(np.abs(y)) > blowup:
        raise IntegrationError(f"Blow-up guard: |state| exceeded {blowup:g}", t)


def integrate_dopri(field: VectorField, y0: np.ndarray, t0: float, t1: float,
                    tol: float = DEFAULT_TOL, max_steps: int = MAX_STEPS,
                    blowup: float = BLOWUP_LIMIT) -> np.ndarray:
    """
    Adaptive Dormand-Prince 5(4) integration from t0 to t1.

    The error of each step is measured in the RMS norm scaled by
    tol + tol * max(|y_n|, |y_n+1|) (absolute = relative = tol). Step
    sizes follow a PI controller; rejected steps shrink with the
    elementary controller.

    Args:
        field: Vector field f(t, y)
        y0: Initial state
        t0: Start time
        t1: End time (>= t0)
        tol: Absolute and relative tolerance
        max_steps: Cap on attempted steps
        blowup: Abort when any component exceeds this magnitude

    Returns:
        State at t1

    Raises:
        IntegrationError: Step-size underflow, blow-up, non-finite state or step cap
    """
    y = np.array(y0, dtype=float)
    span = t1 - t0
    k1 = field(t0, y)
    h = _initial_step(field, t0, y, k1, tol, tol, span)
    t = t0
    err_prev = 1e-4
    rejected = False
    steps = 0
    accepted = 0

    while t < t1:
        if steps >= max_steps:
            raise IntegrationError(f"Step cap of {max_steps} reached", t)
        min_step = 10.0 * np.spacing(max(abs(t), abs(t1)))
        if h < min_step:
            raise IntegrationError("Step-size underflow", t)
        last = t + h >= t1
        if last:
            h = t1 - t

        k = [k1]
        for i in range(1, 7):
            increment = sum(a * ki for a, ki in zip(_A[i], k) if a != 0.0)
            k.append(field(t + _C[i] * h, y + h * increment))
        y_new = y + h * sum(b * ki for b, ki in zip(_B, k) if b != 0.0)
        err_vec = h * sum(e * ki for e, ki in zip(_E, k) if e != 0.0)
        scale = tol + tol * np.maximum(np.abs(y), np.abs(y_new))
        err = _rms(err_vec / scale)
        steps += 1

        if not math.isfinite(err) or not np.all(np.isfinite(y_new)):
            h *= _MIN_FACTOR
            rejected = True
            continue

        if err <= 1.0:
            t = t1 if last else t + h
            y = y_new
            k1 = k[6]
            accepted += 1
            _check_state(y, t, blowup)
            if err == 0.0:
                factor = _MAX_FACTOR
            else:
                factor = _SAFETY * err ** -_PI_BETA1 * err_prev ** _PI_BETA2
            factor = min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
            if rejected:
                factor = min(factor, 1.0)
            err_prev = max(err, 1e-4)
            rejected = False
        else:
            factor = max(_MIN_FACTOR, _SAFETY * err ** (-1 / 5))
            rejected = True
        h *= factor

    logger.debug("dopri: %d steps (%d accepted) over [%g, %g]", steps, accepted, t0, t1)
    return y


def integrate_fixed(field: VectorField, y0: np.ndarray, t0: float, t1: float,
                    steps: int = DEFAULT_FIXED_STEPS, guard: bool = True,
                    blowup: float = BLOWUP_LIMIT) -> np.ndarray:
    """
    Classical RK4 with a fixed number of equal steps.

    Works on arrays of any shape as long as the field is vectorized over
    them, which lets a whole chart row integrate at once.

    Args:
        field: Vector field f(t, y)
        y0: Initial state (any shape)
        t0: Start time
        t1: End time
        steps: Number of steps (>= 1)
        guard: Check finiteness and the blow-up limit after every step

    Returns:
        State at t1
    """
    if steps < 1:
        raise ValueError(f"Invalid step count: {steps}. Must be >= 1.")
    y = np.array(y0, dtype=float)
    h = (t1 - t0) / steps
    half = 0.5 * h
    for i in range(steps):
        t = t0 + i * h
        k1 = field(t, y)
        k2 = field(t + half, y + half * k1)
        k3 = field(t + half, y + half * k2)
        k4 = field(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if guard:
            _check_state(y, t + h, blowup)
    return y


def integrate_array(field: VectorField, y0, t0: float, t1: float, tol: float = DEFAULT_TOL,
                    fixed_steps: Optional[int] = None, max_steps: int = MAX_STEPS) -> np.ndarray:
    """
    Integrate an array-valued IVP with the adaptive or the fixed-step scheme.

    Args:
        field: Vector field f(t, y)
        y0: Initial state
        t0: Start time
        t1: End time (>= t0)
        tol: Tolerance of the adaptive scheme (> 0)
        fixed_steps: Use RK4 with this many steps instead of the adaptive scheme
        max_steps: Step cap of the adaptive scheme

    Returns:
        State at t1; a copy of y0 when t1 == t0
    """
    if t1 < t0:
        raise ValueError(f"Invalid interval: t1 ({t1}) < t0 ({t0}).")
    if tol <= 0:
        raise ValueError(f"Invalid tolerance: {tol}. Must be > 0.")
    y = np.array(y0, dtype=float)
    if t1 == t0:
        return y
    if fixed_steps is not None:
        return integrate_fixed(field, y, t0, t1, fixed_steps)
    return integrate_dopri(field, y, t0, t1, tol, max_steps=max_steps)


def integrate(rhs: VectorField, z0: State, t0: float, t1: float, tol: float = DEFAULT_TOL,
              fixed_steps: Optional[int] = None) -> State:
    """
    Solve the planar IVP z' = rhs(t, z), z(t0) = z0 and return z(t1).

    Example:
        >>> p = ModelParams.resonant(1.0)
        >>> z = integrate(unperturbed_field(p), State(1.0, 0.0), 0.0, 0.0)
        >>> (z.x, z.y)
        (1.0, 0.0)
    """
    return State.from_array(integrate_array(rhs, z0.as_array(), t0, t1, tol, fixed_steps))


def trajectory(field: VectorField, y0, times, tol: float = DEFAULT_TOL,
               fixed_steps: Optional[int] = None) -> np.ndarray:
    """
    Sample a solution at increasing times, chaining integrations between samples.

    Args:
        field: Vector field
        y0: State at times[0]
        times: Nondecreasing sample times
        tol: Adaptive tolerance
        fixed_steps: RK4 steps per sample interval when given

    Returns:
        Array of shape (len(times), len(y0))
    """
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) < 0):
        raise ValueError("Sample times must be nondecreasing.")
    out = np.empty((len(times), len(np.atleast_1d(y0))))
    y = np.array(y0, dtype=float)
    out[0] = y
    for i in range(1, len(times)):
        y = integrate_array(field, y, times[i - 1], times[i], tol, fixed_steps)
        out[i] = y
    return out


def flow_with_monodromy(p: ModelParams, f: ForcingSeries, z0: State, tol: float = DEFAULT_TOL,
                        fixed_steps: Optional[int] = None,
                        t_end: Optional[float] = None) -> Tuple[State, Mat2]:
    """
    Integrate the full system and its variational equation from z0.

    Args:
        p: Model parameters
        f: Forcing
        z0: Initial state
        tol: Adaptive tolerance
        fixed_steps: RK4 steps when given
        t_end: End time, one forcing period by default

    Returns:
        (phi_T(z0), fundamental matrix at T)
    """
    t_end = p.period if t_end is None else t_end
    w0 = np.array([z0.x, z0.y, 1.0, 0.0, 0.0, 1.0])
    w = integrate_array(orbit_variational_field(p, f), w0, 0.0, t_end, tol, fixed_steps)
    return State(float(w[0]), float(w[1])), Mat2.from_array(w[2:])


def monodromy(p: ModelParams, f: ForcingSeries, mode: str = "linear-mathieu",
              z0: Optional[State] = None, tol: float = DEFAULT_TOL,
              fixed_steps: Optional[int] = None) -> Mat2:
    """
    Fundamental matrix over one period T = 2 pi / omega_p, starting from identity.

    Args:
        p: Model parameters
        f: Forcing (used by the linearized-about-orbit mode only)
        mode: 'linear-mathieu' for x'' + (omega_n^2 + eps cos(omega_p t)) x = 0,
              'linearized-about-orbit' for the variational equation along the orbit from z0
        z0: Orbit start, required by the linearized-about-orbit mode
        tol: Adaptive tolerance
        fixed_steps: RK4 steps per period when given

    Returns:
        Monodromy matrix (determinant 1 by Liouville's formula)
    """
    if mode not in MONODROMY_MODES:
        raise ValueError(f"Invalid monodromy mode: {mode}. Must be one of {MONODROMY_MODES}.")
    if mode == "linear-mathieu":
        phi = integrate_array(mathieu_variational_field(p), np.array([1.0, 0.0, 0.0, 1.0]),
                              0.0, p.period, tol, fixed_steps)
        return Mat2.from_array(phi)
    if z0 is None:
        raise ValueError("The linearized-about-orbit mode needs an orbit start z0.")
    return flow_with_monodromy(p, f, z0, tol, fixed_steps)[1]
