"""
Two-timing (multiple scales) slow flows.

Two systems are covered:

* the resonant slow flow of the forced Duffing-Mathieu system, whose
  equilibrium reproduces the averaging prediction;
* the first-tongue slow flow near omega_n = omega_p / 2, written in
  polar (A, psi) and Cartesian (M, N) = (A cos psi, -A sin psi) form,
  with the equilibrium census and its pitchfork bifurcations.

Slow time is T1 = eps t throughout.
"""

import logging
import math
from typing import List, Sequence, Tuple

import numpy as np

from src.models.dynamics import Mat2
from src.models.errors import HypothesisError
from src.models.slow_flow import (
    TWO_PI,
    BifurcationEvent,
    CartesianSlowState,
    EquilibriumEntry,
    EquilibriumReport,
    ResonantEquilibrium,
    SlowState,
    TongueParams,
    normalize_angle,
)
from src.services.ode_core import DEFAULT_TOL, trajectory

logger = logging.getLogger(__name__)

BOUNDARY_TOL = 1e-9
DET_TOL = 1e-12
BOUNDARIES = (-0.5, 0.5)


def resonant_slow_rhs(omega: float, alpha: float, a1: float, b1: float, s: SlowState) -> Tuple[float, float]:
    """
    Resonant slow flow (dA/dT1, dpsi/dT1).

    dA/dT1   = -(a1 sin psi + b1 cos psi) / (2 w)
    dpsi/dT1 = (3 alpha A^3 / 4 - a1 cos psi + b1 sin psi) / (2 w A)

    Raises:
        ValueError: A = 0, where the phase equation is singular
    """
    if s.A == 0:
        raise ValueError("The resonant phase equation is singular at A = 0.")
    c, sn = math.cos(s.psi), math.sin(s.psi)
    d_amp = -(a1 * sn + b1 * c) / (2.0 * omega)
    d_phase = (0.75 * alpha * s.A ** 3 - a1 * c + b1 * sn) / (2.0 * omega * s.A)
    return d_amp, d_phase


def resonant_equilibrium(omega: float, alpha: float, a1: float, b1: float) -> ResonantEquilibrium:
    """
    Nontrivial equilibrium of the resonant slow flow.

    A0 solves a1^2 + b1^2 = 9 alpha^2 A0^6 / 16. With (a1, b1) = rho (cos phi, sin phi)
    the phase is psi0 = -phi for alpha > 0 and pi - phi for alpha < 0.

    Raises:
        HypothesisError: alpha = 0 or a1 = b1 = 0

    Example:
        >>> eq = resonant_equilibrium(1.0, 1.0, 1.0, 0.0)
        >>> round(eq.x0_star, 5), eq.psi0
        (1.10064, 0.0)
    """
    if not omega > 0:
        raise ValueError(f"Invalid omega: {omega}. Must be > 0.")
    if alpha == 0:
        raise HypothesisError("alpha = 0: the resonant slow flow has no nontrivial equilibrium.")
    if a1 == 0 and b1 == 0:
        raise HypothesisError("a1 = b1 = 0: the forcing has no first harmonic.")
    rho2 = a1 ** 2 + b1 ** 2
    amplitude = (16.0 * rho2 / (9.0 * alpha ** 2)) ** (1.0 / 6.0)
    phi = math.atan2(b1, a1)
    psi0 = normalize_angle(-phi if alpha > 0 else math.pi - phi)
    sine_coefficient = -amplitude * math.sin(psi0)
    return ResonantEquilibrium(
        A0=amplitude,
        psi0=psi0,
        x0_star=amplitude * math.cos(psi0),
        y0_star=omega * sine_coefficient,
        sine_coefficient=sine_coefficient,
        omega=omega,
    )


def zeroth_order_solution(eq: ResonantEquilibrium, omega: float, t):
    """
    Zeroth-order approximation x0* cos wt + (y0* / w) sin wt.

    Accepts scalar or array time.
    """
    phase = np.mod(omega * np.asarray(t, dtype=float), TWO_PI)
    value = eq.x0_star * np.cos(phase) + (eq.y0_star / omega) * np.sin(phase)
    return float(value) if np.ndim(value) == 0 else value


def tongue_slow_rhs_polar(tp: TongueParams, s: SlowState) -> Tuple[float, float]:
    """
    First-tongue slow flow in polar form.

    dA/dT1 = A sin(2 psi) / (2 w_p), dpsi/dT1 = (w1 + 3 alpha A^2 / 4 + cos(2 psi) / 2) / w_p.
    """
    d_amp = s.A * math.sin(2.0 * s.psi) / (2.0 * tp.omega_p)
    d_phase = (tp.omega_1 + 0.75 * tp.alpha * s.A ** 2 + 0.5 * math.cos(2.0 * s.psi)) / tp.omega_p
    return d_amp, d_phase


def tongue_slow_rhs_cartesian(tp: TongueParams, c: CartesianSlowState) -> Tuple[float, float]:
    """
    First-tongue slow flow in (M, N).

    M' = [w1 N - N/2 + 3 alpha N (M^2 + N^2) / 4] / w_p
    N' = [-w1 M - M/2 - 3 alpha M (M^2 + N^2) / 4] / w_p
    """
    m, n = c.M, c.N
    r2 = m * m + n * n
    w1, wp, alpha = tp.omega_1, tp.omega_p, tp.alpha
    dm = (w1 * n - 0.5 * n + 0.75 * alpha * n * r2) / wp
    dn = (-w1 * m - 0.5 * m - 0.75 * alpha * m * r2) / wp
    return dm, dn


def tongue_field(tp: TongueParams):
    """Array form of the Cartesian slow flow for the integrators."""
    w1, wp, alpha = tp.omega_1, tp.omega_p, tp.alpha

    def field(t: float, z: np.ndarray) -> np.ndarray:
        m, n = z[0], z[1]
        r2 = m * m + n * n
        return np.array([
            (w1 * n - 0.5 * n + 0.75 * alpha * n * r2) / wp,
            (-w1 * m - 0.5 * m - 0.75 * alpha * m * r2) / wp,
        ])

    return field


def tongue_jacobian(tp: TongueParams, c: CartesianSlowState) -> Mat2:
    """Jacobian of the Cartesian slow flow; its trace vanishes identically."""
    m, n = c.M, c.N
    w1, wp, alpha = tp.omega_1, tp.omega_p, tp.alpha
    return Mat2(
        1.5 * alpha * m * n / wp,
        (w1 - 0.5 + 0.75 * alpha * (m * m + 3.0 * n * n)) / wp,
        (-w1 - 0.5 - 0.75 * alpha * (3.0 * m * m + n * n)) / wp,
        -1.5 * alpha * m * n / wp,
    )


def classify(det_j: float) -> str:
    if det_j > DET_TOL:
        return "center"
    if det_j < -DET_TOL:
        return "saddle"
    return "degenerate"


def _regime(omega_1: float) -> str:
    if abs(abs(omega_1) - 0.5) <= BOUNDARY_TOL:
        return "degenerate-boundary"
    if omega_1 < -0.5:
        return "below-tongue"
    if omega_1 > 0.5:
        return "above-tongue"
    return "inside-tongue"


def _entry(tp: TongueParams, label: str, m: float, n: float, phase) -> EquilibriumEntry:
    point = CartesianSlowState(m, n)
    jac = tongue_jacobian(tp, point)
    return EquilibriumEntry(label, point, phase, jac.det, jac.trace, classify(jac.det))


def tongue_equilibria(tp: TongueParams) -> EquilibriumReport:
    """
    Census of the first-tongue slow-flow equilibria.

    The origin M1 always exists. The pair M2, M3 = (+-A, 0) with
    A^2 = -4 (w1 + 1/2) / (3 alpha) and the pair M4, M5 = (0, +-A) with
    A^2 = -4 (w1 - 1/2) / (3 alpha) exist when their A^2 is positive. For
    alpha < 0 this gives 1, 3 and 5 equilibria below, inside and above
    the tongue; alpha > 0 mirrors the conditions.

    Each entry carries det and trace of the Jacobian and a center/saddle
    label. Within 1e-9 of |w1| = 1/2 no census is taken and the report is
    marked 'degenerate-boundary'.

    Example:
        >>> tongue_equilibria(TongueParams(omega_p=2.0, omega_1=1.0, alpha=-1.0)).count
        5
    """
    w1, wp = tp.omega_1, tp.omega_p
    regime = _regime(w1)
    convention = "standard" if tp.alpha < 0 else "mirrored"
    printed = (4.0 * w1 ** 2 - 1.0) / (4.0 * wp)
    consistent = (4.0 * w1 ** 2 - 1.0) / (4.0 * wp ** 2)
    if regime == "degenerate-boundary":
        logger.info("omega_1 = %g lies on a tongue boundary; no census taken", w1)
        return EquilibriumReport(tp, regime, convention, [], printed, consistent)
    if convention == "mirrored":
        logger.debug("alpha > 0: census uses the mirrored existence conditions")

    entries: List[EquilibriumEntry] = [_entry(tp, "M1", 0.0, 0.0, None)]
    horizontal = -4.0 * (w1 + 0.5) / (3.0 * tp.alpha)
    if horizontal > 0:
        a = math.sqrt(horizontal)
        entries.append(_entry(tp, "M2", a, 0.0, 0.0))
        entries.append(_entry(tp, "M3", -a, 0.0, math.pi))
    vertical = -4.0 * (w1 - 0.5) / (3.0 * tp.alpha)
    if vertical > 0:
        a = math.sqrt(vertical)
        entries.append(_entry(tp, "M4", 0.0, a, 1.5 * math.pi))
        entries.append(_entry(tp, "M5", 0.0, -a, 0.5 * math.pi))
    return EquilibriumReport(tp, regime, convention, entries, printed, consistent)


def transition_curves(omega_p: float, epsilon: float) -> Tuple[float, float]:
    """
    First-order transition curves omega_n^2 = omega_p^2 / 4 -+ eps / 2.

    Example:
        >>> transition_curves(1.0, 0.2)
        (0.15, 0.35)
    """
    if not omega_p > 0:
        raise ValueError(f"Invalid omega_p: {omega_p}. Must be > 0.")
    if epsilon < 0:
        raise ValueError(f"Invalid epsilon: {epsilon}. Must be >= 0.")
    tip = omega_p ** 2 / 4.0
    return tip - epsilon / 2.0, tip + epsilon / 2.0


def _side(boundary: float, neighbour: float) -> float:
    # census point on the neighbour's side of boundary, short of any other boundary
    others = [b for b in BOUNDARIES if b != boundary and min(boundary, neighbour) < b < max(boundary, neighbour)]
    if not others:
        return neighbour
    nearest = min(others, key=lambda b: abs(b - boundary))
    return 0.5 * (boundary + nearest)


def bifurcation_scan(tp: TongueParams, omega_1_grid: Sequence[float]) -> List[BifurcationEvent]:
    """
    Detect the pitchfork bifurcations crossed by a monotone omega_1 sweep.

    The census is taken at every non-degenerate grid point. Where it
    changes between consecutive points, each boundary w1 = -+1/2 lying
    between them is an event: the equilibrium pair present only on the
    richer side is the one born, and the event is 'supercritical' when
    that pair are centers and 'subcritical' when they are saddles.
    Events are returned in increasing omega_1.

    Raises:
        ValueError: The grid is not monotone
    """
    grid = np.asarray(omega_1_grid, dtype=float)
    steps = np.diff(grid)
    if not (np.all(steps > 0) or np.all(steps < 0)):
        raise ValueError("The omega_1 grid must be strictly monotone.")
    usable = sorted(float(w) for w in grid if _regime(float(w)) != "degenerate-boundary")
    census = {w: tongue_equilibria(tp.with_detuning(w)) for w in usable}

    events: List[BifurcationEvent] = []
    for lo, hi in zip(usable, usable[1:]):
        if census[lo].count == census[hi].count:
            continue
        for boundary in (b for b in BOUNDARIES if lo < b < hi):
            below_w, above_w = _side(boundary, lo), _side(boundary, hi)
            below = census[below_w] if below_w in census else tongue_equilibria(tp.with_detuning(below_w))
            above = census[above_w] if above_w in census else tongue_equilibria(tp.with_detuning(above_w))
            if below.count == above.count:
                continue
            richer, poorer = (above, below) if above.count > below.count else (below, above)
            born = [label for label in richer.labels() if label not in poorer.labels()]
            kinds = {richer.entry(label).classification for label in born}
            kind = "supercritical" if kinds == {"center"} else "subcritical"
            events.append(BifurcationEvent(
                omega_1=boundary,
                kind=kind,
                count_below=below.count,
                count_above=above.count,
                born=born,
                origin_below=below.entries[0].classification,
                origin_above=above.entries[0].classification,
            ))
            logger.info("%s pitchfork at omega_1 = %g, born %s", kind, boundary, born)
    return events


def tongue_zeroth_order(c: CartesianSlowState, omega_p: float, t):
    """Zeroth-order tongue response M cos(w_p t / 2) + N sin(w_p t / 2)."""
    phase = np.mod(0.5 * omega_p * np.asarray(t, dtype=float), TWO_PI)
    value = c.M * np.cos(phase) + c.N * np.sin(phase)
    return float(value) if np.ndim(value) == 0 else value


def detuning_to_delta(omega_p: float, epsilon: float, omega_1: float) -> float:
    """omega_n^2 = omega_p^2 / 4 + eps omega_1."""
    return omega_p ** 2 / 4.0 + epsilon * omega_1


def delta_to_detuning(omega_p: float, epsilon: float, delta: float) -> float:
    """Inverse of detuning_to_delta; needs eps != 0."""
    if epsilon == 0:
        raise ValueError("Detuning is undefined for epsilon = 0.")
    return (delta - omega_p ** 2 / 4.0) / epsilon


def polar_to_cartesian(s: SlowState) -> CartesianSlowState:
    return CartesianSlowState(s.A * math.cos(s.psi), -s.A * math.sin(s.psi))


def cartesian_to_polar(c: CartesianSlowState) -> SlowState:
    return SlowState(c.norm(), math.atan2(-c.N, c.M))


def slow_flow_trajectory(tp: TongueParams, c0: CartesianSlowState, t_end: float,
                         samples: int = 201, tol: float = DEFAULT_TOL) -> np.ndarray:
    """
    Sample the Cartesian slow flow on [0, t_end].

    Returns:
        Array of rows (T1, M, N)
    """
    if t_end <= 0:
        raise ValueError(f"Invalid t_end: {t_end}. Must be > 0.")
    if samples < 2:
        raise ValueError(f"Invalid samples: {samples}. Must be >= 2.")
    times = np.linspace(0.0, t_end, samples)
    states = trajectory(tongue_field(tp), np.array([c0.M, c0.N]), times, tol)
    return np.column_stack([times, states])
