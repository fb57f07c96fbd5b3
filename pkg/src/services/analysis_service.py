"""
Analysis service that combines the numerical modules with result storage.

Each run_* method computes one subcommand's results from a RunConfig,
writes its files through StorageService and returns the main record.
Numerical results are exactly those of the direct module calls.
"""

import logging
import math
from typing import List, Optional

import numpy as np

from src.models.config import RunConfig
from src.models.dynamics import State
from src.models.errors import HypothesisError, NumericalError
from src.models.slow_flow import CartesianSlowState, TongueParams
from src.services import averaging, floquet_chart, orbit, two_timing
from src.services.storage_service import StorageService

logger = logging.getLogger(__name__)


class AnalysisService:
    """
    High-level service running every analysis with automatic output files.

    Attributes:
        config: Resolved run configuration
        storage: Writer for the output directory
    """

    def __init__(self, config: Optional[RunConfig] = None):
        """
        Initialize analysis service.

        Args:
            config: Run configuration, defaults when omitted
        """
        self.config = config or RunConfig()
        self.storage = StorageService(self.config.output_dir)

    def _metadata(self, command: str) -> dict:
        return {"command": command, "config": self.config.to_dict()}

    def _require_resonant(self) -> None:
        p = self.config.model
        if not p.is_resonant:
            raise HypothesisError(
                f"This analysis needs the resonant case omega_n = omega_p (got {p.omega_n}, {p.omega_p})."
            )

    def _chart_steps(self) -> Optional[int]:
        # integration.fixed_step overrides chart.adaptive
        integration = self.config.integration
        if self.config.chart.adaptive and not integration.fixed_step:
            return None
        return integration.steps_per_period

    def run_predict(self) -> dict:
        """
        Averaging prediction, certified by Newton and by quadrature.

        Returns:
            Record written to prediction.json
        """
        self._require_resonant()
        cfg = self.config
        p, f = cfg.model, cfg.forcing
        omega = p.omega_p
        prediction = averaging.predict(omega, p.alpha, f.a1, f.b1, cfg.predict.tolerance)

        def objective(z: State):
            return averaging.bifurcation_fn_closed(omega, p.alpha, f.a1, f.b1, z)

        root = averaging.newton_root(
            objective, prediction.state, cfg.predict.newton_tol, cfg.predict.max_iter,
            jacobian=lambda z: averaging.averaging_jacobian(omega, p.alpha, z),
        )
        quadrature = averaging.bifurcation_fn_quadrature(p, f, prediction.state, cfg.bifurcation.quad_points)
        record = {
            **self._metadata("predict"),
            "prediction": prediction.to_dict(),
            "newton_root": root.to_dict(),
            "quadrature_residual": quadrature.norm(),
            "slow_flow_equilibrium": two_timing.resonant_equilibrium(omega, p.alpha, f.a1, f.b1).to_dict(),
        }
        self.storage.write_json("prediction.json", record)
        return record

    def run_bifurcation(self) -> List[list]:
        """
        Closed-form and quadrature bifurcation function over the (x0, y0) grid.

        Rows are ordered with x0 outer and y0 varying fastest.

        Returns:
            Rows (x0, y0, f11, f21, f11_quad, f21_quad, abs_diff) written to bifurcation.csv
        """
        self._require_resonant()
        cfg = self.config
        p, f = cfg.model, cfg.forcing
        rows = []
        for x0 in cfg.bifurcation.x0.values():
            for y0 in cfg.bifurcation.y0.values():
                z0 = State(float(x0), float(y0))
                closed = averaging.bifurcation_fn_closed(p.omega_p, p.alpha, f.a1, f.b1, z0)
                quad = averaging.bifurcation_fn_quadrature(p, f, z0, cfg.bifurcation.quad_points)
                diff = max(abs(closed.f11 - quad.f11), abs(closed.f21 - quad.f21))
                rows.append([z0.x, z0.y, closed.f11, closed.f21, quad.f11, quad.f21, diff])
        self.storage.write_csv(
            "bifurcation.csv", ["x0", "y0", "f11", "f21", "f11_quad", "f21_quad", "abs_diff"], rows
        )
        self.storage.write_json("bifurcation_meta.json", {
            **self._metadata("bifurcation"),
            "order": "x0 outer, y0 fastest",
            "max_abs_diff": max(r[6] for r in rows),
        })
        return rows

    def run_shoot(self) -> dict:
        """
        Refine the averaging prediction into a periodic orbit.

        On a numerical failure orbit_failure.json records the best iterate
        before the error propagates.

        Returns:
            Record written to orbit.json
        """
        self._require_resonant()
        cfg = self.config
        p, f = cfg.model, cfg.forcing
        prediction = averaging.predict(p.omega_p, p.alpha, f.a1, f.b1, cfg.predict.tolerance)
        try:
            refined = orbit.shoot_refine(
                p, f, prediction.state, cfg.shoot.tol, cfg.shoot.max_iter, cfg.shoot.integration_tol,
                fixed_steps=cfg.integration.fixed_steps,
            )
        except NumericalError as e:
            best = getattr(e, "best", None) or getattr(e, "iterate", None)
            self.storage.write_json("orbit_failure.json", {
                **self._metadata("shoot"),
                "error": type(e).__name__,
                "message": str(e),
                "best": best.to_dict() if best is not None else None,
                "residual": getattr(e, "residual", None),
                "iterations": getattr(e, "iterations", None),
            })
            raise

        equilibrium = two_timing.resonant_equilibrium(p.omega_p, p.alpha, f.a1, f.b1)
        steps = cfg.integration.fixed_steps
        samples = orbit.sample_orbit(refined, samples=cfg.shoot.samples, fixed_steps=steps)
        record = {
            **self._metadata("shoot"),
            "orbit": refined.to_dict(),
            "prediction": prediction.to_dict(),
            "distance_to_prediction": refined.z_star.distance(prediction.state),
            "two_timing_max_error": orbit.compare_two_timing(refined, p, equilibrium, cfg.shoot.samples, steps),
        }
        self.storage.write_json("orbit.json", record)
        self.storage.write_csv("orbit_samples.csv", ["t", "x", "y"], samples.tolist())
        return record

    def run_converge(self) -> dict:
        """
        Convergence study over the configured epsilon list.

        Returns:
            Record with rows and slope; the table goes to convergence.csv
        """
        self._require_resonant()
        cfg = self.config
        study = orbit.convergence_study(
            cfg.model, cfg.forcing, list(cfg.converge.eps_list), cfg.shoot.tol, cfg.shoot.max_iter,
            cfg.shoot.integration_tol, fixed_steps=cfg.integration.fixed_steps,
        )
        self.storage.write_csv(
            "convergence.csv", ["epsilon", "error", "slope"],
            [[row.epsilon, row.error, study.slope] for row in study.rows],
        )
        record = {
            **self._metadata("converge"),
            "rows": [{"epsilon": r.epsilon, "error": r.error, "message": r.message} for r in study.rows],
            "slope": study.slope,
            "slope_defined": study.slope_defined,
        }
        self.storage.write_json("convergence_meta.json", record)
        return record

    def run_chart(self) -> dict:
        """
        Ince-Strutt chart; cells go to chart.csv, axes and quality to chart_meta.json.
        """
        opts = self.config.chart
        steps = self._chart_steps()
        grid = floquet_chart.sweep_chart(
            opts.delta, opts.epsilon, opts.omega_p, opts.margin, self.config.integration.tol,
            fixed_steps=steps,
        )
        self.storage.write_csv(
            "chart.csv", ["delta", "epsilon", "trace", "verdict"],
            [[c.delta, c.epsilon, c.trace, c.verdict] for c in grid.cells],
        )
        finite = [abs(c.det - 1.0) for c in grid.cells if math.isfinite(c.det)]
        verdicts = {v: sum(1 for c in grid.cells if c.verdict == v)
                    for v in ("stable", "unstable", "boundary", "failed")}
        record = {
            **self._metadata("chart"),
            **grid.metadata(),
            "integrator": "dopri5" if steps is None else f"rk4, {steps} steps per period",
            "counts": verdicts,
            "max_det_drift": max(finite) if finite else None,
            "all_det_ok": all(c.det_ok for c in grid.cells),
            "failures": [{"delta": c.delta, "epsilon": c.epsilon, "error": c.error}
                         for c in grid.cells if c.verdict == "failed"],
        }
        self.storage.write_json("chart_meta.json", record)
        return record

    def run_transition(self) -> dict:
        """
        Analytic first-tongue transition curves, plus bisected boundaries when enabled.
        """
        opts = self.config.transition
        epsilons = opts.epsilon.values()
        analytic = [[float(e), *two_timing.transition_curves(opts.omega_p, float(e))] for e in epsilons]
        self.storage.write_csv("transition.csv", ["epsilon", "delta_minus", "delta_plus"], analytic)
        record = {**self._metadata("transition"), "analytic": analytic}
        if opts.bisect:
            numeric = []
            for e, lower, upper in analytic:
                d_minus, d_plus = floquet_chart.first_tongue_boundaries(
                    e, opts.omega_p, opts.tol, fixed_steps=self.config.integration.fixed_steps,
                )
                numeric.append([e, d_minus, d_plus, d_minus - lower, d_plus - upper])
            self.storage.write_csv(
                "transition_numeric.csv",
                ["epsilon", "delta_minus", "delta_plus", "dev_minus", "dev_plus"],
                numeric,
            )
            record["numeric"] = numeric
        self.storage.write_json("transition_meta.json", record)
        return record

    def run_slowflow(self) -> dict:
        """
        Equilibrium census at the configured detuning and pitchfork events over the sweep.
        """
        opts = self.config.slowflow
        tp = TongueParams(opts.omega_p, opts.omega_1, opts.alpha, opts.epsilon)
        report = two_timing.tongue_equilibria(tp)
        events = two_timing.bifurcation_scan(tp, opts.sweep.values())
        record = {
            **self._metadata("slowflow"),
            "census": report.to_dict(),
            "delta": two_timing.detuning_to_delta(tp.omega_p, tp.epsilon, tp.omega_1),
            "events": [e.to_dict() for e in events],
        }
        if opts.trajectory is not None:
            start = CartesianSlowState(*opts.trajectory.start)
            rows = two_timing.slow_flow_trajectory(tp, start, opts.trajectory.t_end, opts.trajectory.samples)
            self.storage.write_csv("slowflow_trajectory.csv", ["t1", "M", "N"], np.asarray(rows).tolist())
            record["trajectory_file"] = "slowflow_trajectory.csv"
        self.storage.write_json("slowflow.json", record)
        return record
