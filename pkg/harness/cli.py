"""Command-line entry point: boris-gc run|banana|converge|check."""

import argparse
import logging
import sys
from typing import Any, Callable

from config import config as runtime_config
from core.errors import ConfigurationError, FieldDomainError, NonFinite
from harness.commands import cmd_banana, cmd_check, cmd_converge, cmd_run
from harness.schemas import ExperimentConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_CONFIG = 2

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def _common_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", type=str, help="JSON experiment config file")
    parent.add_argument("--method", type=str, action="append", help="Method name (repeatable)")
    parent.add_argument("--h", type=float, help="Stepsize")
    parent.add_argument("--eps", type=float, help="Small parameter eps")
    parent.add_argument("--T", type=float, help="Final time")
    parent.add_argument("--out", type=str, help="Output directory")
    parent.add_argument("--plots", action="store_true", default=None, help="Emit SVG plots")
    parent.add_argument("--workers", type=int, help="Concurrent runs")
    parent.add_argument("--full", action="store_true", default=None, help="Full eps sweep j = 13..22")
    parent.add_argument("--log-level", type=str, help="Logging level")
    parent.add_argument("--seed", type=int, help="Seed for sampled checks")
    parent.add_argument(
        "--no-richardson",
        action="store_false",
        dest="richardson",
        default=None,
        help="Skip the reference self-check",
    )
    parent.add_argument("--nondeg-bound", type=float, help="Bound on the nondegeneracy norm")
    return parent


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with one subparser per experiment."""
    parser = argparse.ArgumentParser(
        prog="boris-gc",
        description="Boris integrators for charged particles in strong magnetic fields",
    )
    subparsers = parser.add_subparsers(dest="experiment", required=True)
    parent = _common_options()
    subparsers.add_parser("run", parents=[parent], help="Integrate one configuration")
    subparsers.add_parser("banana", parents=[parent], help="Banana-orbit method comparison")
    subparsers.add_parser("converge", parents=[parent], help="Error sweep over h and eps")
    subparsers.add_parser("check", parents=[parent], help="Nondegeneracy and invariant checks")
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    """
    Merge the config file (if any) with the CLI flags.

    Raises:
        ConfigurationError: for unreadable or invalid settings
    """
    base = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    overrides: dict[str, Any] = {
        "experiment": args.experiment,
        "methods": args.method,
        "h": args.h,
        "eps": args.eps,
        "T": args.T,
        "out_dir": args.out,
        "emit_plots": args.plots,
        "workers": args.workers,
        "full": args.full,
        "log_level": args.log_level,
        "seed": args.seed,
        "richardson": args.richardson,
        "nondegeneracy_bound": args.nondeg_bound,
    }
    return base.merged(overrides)


def _configure_logging(level: str) -> None:
    numeric = logging.getLevelName(level.upper())
    if not isinstance(numeric, int):
        raise ConfigurationError(f"Unknown log level '{level}'")
    logging.basicConfig(level=numeric, format=LOG_FORMAT, stream=sys.stderr, force=True)


def _run(cfg: ExperimentConfig) -> int:
    if cfg.experiment == "check":
        return EXIT_OK if cmd_check(cfg).passed else EXIT_NUMERICAL
    commands: dict[str, Callable[[ExperimentConfig], object]] = {
        "run": cmd_run,
        "banana": cmd_banana,
        "converge": cmd_converge,
    }
    commands[cfg.experiment](cfg)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    """
    Parse arguments, run the experiment and map failures to exit codes.

    Returns:
        0 on success, 1 on numerical failure, 2 on configuration errors
    """
    args = build_parser().parse_args(argv)
    try:
        _configure_logging(args.log_level or runtime_config.log_level)
        cfg = load_config(args)
        _configure_logging(cfg.log_level)
        return _run(cfg)
    except ConfigurationError as exc:
        logger.error("Configuration error: %s", exc)
        return EXIT_CONFIG
    except (NonFinite, FieldDomainError) as exc:
        logger.error("Numerical failure: %s", exc)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
