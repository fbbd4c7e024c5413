"""
Command line front end.

Progress goes to standard error through logging; standard output carries
only machine-readable summaries. Exit status: 0 success, 1 some check
FAILed, 2 invalid input or configuration, 3 numerical or sampler failure.
"""

import argparse
import csv
import logging
import os
import sys
from typing import Any, Dict, List, Optional, Sequence

from .analysis.checks import CheckRegistry
from .analysis.verification import lil_constants
from .core.runner import EXIT_INVALID, EXIT_NUMERICAL, ExperimentRunner, RunResult
from .core.types import EstimatorType, ExperimentConfig, ProcessKind
from .exceptions import (
    ConfigurationError,
    NumericalError,
    ProcessingError,
    SamplerError,
    ValidationError,
)
from .processors.input import ConfigProcessor
from .utils import SEED_MASK, format_error_message, format_float

logger = logging.getLogger("fraclt")

DEFAULT_SWEEP = tuple(round(0.1 * k, 10) for k in range(1, 10))
CONSTANT_COLUMNS = (
    "tau", "kind", "delta_tau", "theta0", "theta_lo", "theta_hi",
    "c_tau", "limsup_lo", "limsup_hi", "bracket_ordered",
)


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value <= SEED_MASK:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return value


def _reals(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Experiment file (key = value with [section] headers)")
    common.add_argument("--seed", type=_seed, help="Master seed (unsigned 64-bit)")
    common.add_argument("--threads", type=int, help="Worker threads")
    common.add_argument("--replicates", type=int, help="Number of replicates")
    common.add_argument("--out", help="Output directory")
    common.add_argument("--format", choices=("csv",), default="csv", help="Artifact format")
    common.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")

    parser = argparse.ArgumentParser(
        prog="fraclt",
        description="Sample fBm and Riemann-Liouville paths, estimate local times and verify limit laws.",
    )
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True

    commands.add_parser("simulate", parents=[common], help="Sample paths and write them as CSV")

    localtime = commands.add_parser("localtime", parents=[common], help="Local time field of one path")
    localtime.add_argument("--estimator", choices=EstimatorType.ALL, default=EstimatorType.EPS_OCCUPATION)
    localtime.add_argument("--replicate", type=int, default=0, help="Replicate index of the path")

    verify = commands.add_parser("verify", parents=[common], help="Run named verification checks")
    verify.add_argument("--checks", help=f"Comma-separated subset of: {', '.join(CheckRegistry.list())}")

    commands.add_parser("lil", parents=[common], help="Law of the iterated logarithm statistics")

    limit = commands.add_parser("limit", parents=[common], help="First-order limit along a lambda ladder")
    limit.add_argument("--ladder", type=_reals, help="Strictly increasing ladder starting at 1")

    constants = commands.add_parser("constants", parents=[common], help="Print the LIL constant table")
    constants.add_argument("--tau", type=_reals, help="Comma-separated indices in (0, 1)")
    constants.add_argument("--kind", choices=ProcessKind.ALL, default=ProcessKind.FBM)
    return parser


def configure_logging(level: Optional[str]) -> None:
    name = (level or os.environ.get("FRACLT_LOG_LEVEL") or "WARNING").upper()
    numeric = logging.getLevelName(name)
    if not isinstance(numeric, int):
        raise ConfigurationError(f"Unknown log level: {level}")
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger("fraclt")
    root.handlers[:] = [handler]
    root.setLevel(numeric)
    root.propagate = False


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    overrides: Dict[str, Any] = {
        "master_seed": args.seed,
        "threads": args.threads,
        "replicates": args.replicates,
        "output_dir": args.out,
    }
    if getattr(args, "checks", None):
        overrides["checks"] = tuple(c.strip() for c in args.checks.split(",") if c.strip())
    if getattr(args, "ladder", None):
        overrides["lambda_ladder"] = tuple(args.ladder)
    return overrides


def print_constants(taus: Sequence[float], kind: str, stream=None) -> None:
    writer = csv.writer(stream or sys.stdout, lineterminator="\n")
    writer.writerow(CONSTANT_COLUMNS)
    for tau in taus:
        c = lil_constants(tau, kind)
        writer.writerow((
            format_float(c.tau), c.kind, format_float(c.delta_tau), format_float(c.theta0),
            format_float(c.theta_lo), format_float(c.theta_hi), format_float(c.c_tau),
            format_float(c.limsup_lo), format_float(c.limsup_hi), str(c.bracket_ordered).lower(),
        ))


def _print_summary(result: RunResult) -> None:
    for report in result.reports:
        print(f"{report.name} {report.decision}")


def execute(args: argparse.Namespace, config: ExperimentConfig) -> RunResult:
    runner = ExperimentRunner(config)
    if args.command == "simulate":
        runner.simulate()
        return runner.finish([])
    if args.command == "localtime":
        runner.localtime(args.estimator, args.replicate)
        return runner.finish([])
    if args.command == "lil":
        return runner.finish(runner.verify(["lil"]))
    if args.command == "limit":
        return runner.finish(runner.verify(["first_order_limit"]))
    return runner.finish(runner.verify(config.checks))


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        processor = ConfigProcessor()
        configure_logging(args.log_level)
        if args.command == "constants":
            print_constants(args.tau or DEFAULT_SWEEP, args.kind)
            return 0
        config = processor.load(args.config, _overrides(args))
        result = execute(args, config)
    except (ValidationError, ConfigurationError) as e:
        print(format_error_message(e, "fraclt: invalid input"), file=sys.stderr)
        return EXIT_INVALID
    except (NumericalError, SamplerError, ProcessingError) as e:
        print(format_error_message(e, "fraclt: computation failed"), file=sys.stderr)
        return EXIT_NUMERICAL
    _print_summary(result)
    return result.exit_status


def run_cli() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run_cli()
