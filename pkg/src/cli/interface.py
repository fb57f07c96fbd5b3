"""
Command-line interface for the Mathieu-Duffing toolkit.

Usage:
    python -m src.main [--config PATH] [--out DIR] [--fixed-step] [--quiet | --verbose] COMMAND

Exit codes: 0 ok, 2 invalid configuration, 3 violated hypothesis
(alpha = 0, a1 = b1 = 0, non-resonant input), 4 numerical failure.
"""

import argparse
import logging
import sys
from typing import List, Optional

from src.models.config import RunConfig
from src.models.errors import ConfigError, HypothesisError, NumericalError
from src.parsers.config_parser import load_config
from src.parsers.validator import COMMANDS, validate_command
from src.services.analysis_service import AnalysisService

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_HYPOTHESIS = 3
EXIT_NUMERICAL = 4


class ToolkitCLI:
    """
    Runs one analysis subcommand per invocation.

    Attributes:
        config: Resolved run configuration
        service: Analysis service writing into config.output_dir
    """

    def __init__(self, config: Optional[RunConfig] = None):
        """Initialize CLI with an analysis service."""
        self.config = config or RunConfig()
        self.service = AnalysisService(self.config)

    def cmd_predict(self, seed_check: bool = False):
        """Averaging prediction of the periodic orbit's initial condition."""
        record = self.service.run_predict()
        prediction = record["prediction"]
        print(f"x0* = {prediction['x0_star']:.12g}, y0* = {prediction['y0_star']:.12g}")
        print(f"det J = {prediction['det_jacobian']:.6g}, residual = {prediction['residual_norm']:.3e}")
        if seed_check:
            for name, value in sorted(prediction["convention_residuals"].items()):
                print(f"  {name} cube roots: residual {value:.3e}")
        print(f"\n✓ Prediction written to {self.service.storage.path_for('prediction.json')}\n")

    def cmd_bifurcation(self):
        """Bifurcation function table, closed form against quadrature."""
        rows = self.service.run_bifurcation()
        print(f"{len(rows)} grid points, max |closed - quadrature| = {max(r[6] for r in rows):.3e}")
        print(f"\n✓ Table written to {self.service.storage.path_for('bifurcation.csv')}\n")

    def cmd_shoot(self):
        """Refine the prediction into a periodic orbit."""
        record = self.service.run_shoot()
        result = record["orbit"]
        print(f"z* = ({result['z_star']['x']:.12g}, {result['z_star']['y']:.12g})")
        print(f"residual = {result['residual']:.3e} after {result['iterations']} iterations, "
              f"max |multiplier| = {result['max_multiplier']:.8f}")
        print(f"\n✓ Orbit written to {self.service.storage.path_for('orbit.json')}\n")

    def cmd_converge(self):
        """Convergence of refined orbits to the prediction as epsilon shrinks."""
        record = self.service.run_converge()
        for row in record["rows"]:
            error = "failed" if row["error"] is None else f"{row['error']:.6e}"
            print(f"  eps = {row['epsilon']:<10g} error = {error}")
        if record["slope_defined"]:
            print(f"slope = {record['slope']:.4f}")
        else:
            print("slope undefined (fewer than two successful rows)")
        print(f"\n✓ Table written to {self.service.storage.path_for('convergence.csv')}\n")

    def cmd_chart(self):
        """Ince-Strutt chart of the linear Mathieu equation."""
        record = self.service.run_chart()
        counts = ", ".join(f"{k}: {v}" for k, v in record["counts"].items())
        print(f"{counts}")
        print(f"\n✓ Chart written to {self.service.storage.path_for('chart.csv')}\n")

    def cmd_transition(self):
        """First-tongue transition curves."""
        record = self.service.run_transition()
        print(f"{len(record['analytic'])} epsilon values")
        if "numeric" in record:
            worst = max(max(abs(r[3]), abs(r[4])) for r in record["numeric"])
            print(f"max |bisected - analytic| = {worst:.3e}")
        print(f"\n✓ Curves written to {self.service.storage.path_for('transition.csv')}\n")

    def cmd_slowflow(self):
        """Slow-flow equilibrium census and pitchfork events."""
        record = self.service.run_slowflow()
        census = record["census"]
        print(f"regime: {census['regime']} ({census['convention']} convention)")
        for entry in census["entries"]:
            print(f"  {entry['label']}: ({entry['M']:.6g}, {entry['N']:.6g}) "
                  f"det J = {entry['det_j']:.6g} -> {entry['classification']}")
        for event in record["events"]:
            print(f"  {event['kind']} pitchfork at omega_1 = {event['omega_1']:g}, born {event['born']}")
        print(f"\n✓ Census written to {self.service.storage.path_for('slowflow.json')}\n")

    def dispatch(self, command: str, seed_check: bool = False):
        """
        Run one subcommand.

        Args:
            command: Subcommand name
            seed_check: Print both cube-root convention residuals (predict only)
        """
        commands = {
            "predict": lambda: self.cmd_predict(seed_check),
            "bifurcation": self.cmd_bifurcation,
            "shoot": self.cmd_shoot,
            "converge": self.cmd_converge,
            "chart": self.cmd_chart,
            "transition": self.cmd_transition,
            "slowflow": self.cmd_slowflow,
        }
        commands[command]()


def build_parser() -> argparse.ArgumentParser:
    """Argument parser; global flags are accepted before or after the subcommand."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="JSON configuration file")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory (overrides config)")
    common.add_argument("--fixed-step", action="store_true", default=argparse.SUPPRESS,
                        help="fixed-step RK4 integration")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS, help="warnings only")
    verbosity.add_argument("--verbose", action="store_true", default=argparse.SUPPRESS, help="debug output")

    parser = argparse.ArgumentParser(
        prog="mathieu-duffing",
        description="Periodic solutions and stability of the forced Mathieu-Duffing equation.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name, parents=[common])
        if name == "predict":
            cmd.add_argument("--seed-check", action="store_true", help="print both cube-root convention residuals")
    return parser


def configure_logging(quiet: bool = False, verbose: bool = False) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr, force=True)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Entry point for CLI.

    Returns:
        Process exit code
    """
    args = build_parser().parse_args(argv)
    configure_logging(getattr(args, "quiet", False), getattr(args, "verbose", False))

    try:
        config = load_config(getattr(args, "config", None)).with_overrides(
            output_dir=getattr(args, "out", None),
            fixed_step=True if getattr(args, "fixed_step", False) else None,
        )
        errors = validate_command(config, args.command)
        if errors:
            raise ConfigError(errors)
        cli = ToolkitCLI(config)
        cli.dispatch(args.command, seed_check=getattr(args, "seed_check", False))
    except ConfigError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except HypothesisError as e:
        print(f"Error: hypothesis violated: {e}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except NumericalError as e:
        print(f"Error: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as e:
        print(f"Error: invalid input: {e}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
