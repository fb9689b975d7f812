"""Command-line entry point."""

import argparse
from pathlib import Path
from typing import Dict, List, Optional

import structlog

from siet import __description__, __version__
from siet.cli.commands import coverage, eeh, feasibility, figures, montecarlo
from siet.cli.run_config import dump_config, load_run_config
from siet.core.exceptions import ExitCode, SietException
from siet.core.logging import configure_logging

logger = structlog.get_logger()

COMMANDS = (coverage, eeh, montecarlo, figures, feasibility)

# argparse dest -> config key
FLAG_KEYS = {
    "out": "run.out",
    "scenario": "run.scenario",
    "density": "system.lambda",
    "power": "system.power",
    "alpha": "system.alpha",
    "sigma2": "system.sigma2",
    "rho": "system.rho",
    "epsilon": "system.epsilon",
    "T": "thresholds.T",
    "theta": "thresholds.theta",
    "pm": "energy.pm",
    "zeta": "energy.zeta",
    "eta": "energy.eta",
    "seed": "sim.seed",
    "trials": "sim.trials",
    "workers": "sim.workers",
    "coverage_floor": "constraints.coverage_floor",
    "power_max": "constraints.power_max",
    "lambda_max": "constraints.lambda_max",
    "target": "grid.targets",
}

EFFECTIVE_CONFIG_NAME = "effective.conf"


def _global_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)

    run = common.add_argument_group("run")
    run.add_argument("--config", metavar="PATH", help="key=value config file")
    run.add_argument("--out", metavar="DIR", help="Output directory")
    run.add_argument("--scenario", help="Scenario name recorded in the effective config")
    run.add_argument(
        "--dump-config",
        nargs="?",
        const="",
        metavar="PATH",
        help=f"Write the effective config (default: OUT/{EFFECTIVE_CONFIG_NAME})",
    )
    run.add_argument("--log-level", help="Log level (default from SIET_LOG_LEVEL)")
    run.add_argument("--log-format", choices=["json", "console"], help="Log renderer")

    system = common.add_argument_group("system parameters")
    system.add_argument("--lambda", dest="density", metavar="BS_PER_M2", help="BS density")
    system.add_argument("--power", metavar="W", help="Transmit power; W, mW, uW suffixes accepted")
    system.add_argument("--alpha", help="Path-loss exponent")
    system.add_argument("--sigma2", metavar="W", help="Noise power")
    system.add_argument("--rho", help="Power-splitting factor")
    system.add_argument("--epsilon", help="Probability the user is active")

    thresholds = common.add_argument_group("thresholds and energy budget")
    thresholds.add_argument("--T", dest="T", help="SINR threshold (linear)")
    thresholds.add_argument("--theta", metavar="W", help="EEH threshold")
    thresholds.add_argument("--pm", metavar="W", help="Maintenance power")
    thresholds.add_argument("--zeta", help="Availability factor")
    thresholds.add_argument("--eta", help="Converter efficiency")

    constraints = common.add_argument_group("constraints")
    constraints.add_argument("--coverage-floor", help="Minimum coverage probability")
    constraints.add_argument("--power-max", metavar="W", help="Transmit power cap")
    constraints.add_argument("--lambda-max", help="Density cap, BS per square meter")

    sim = common.add_argument_group("simulation and grids")
    sim.add_argument("--seed", help="Monte Carlo seed")
    sim.add_argument("--trials", help="Monte Carlo trials")
    sim.add_argument("--workers", help="Monte Carlo worker threads")
    sim.add_argument("--grid", help="Comma-separated grid for the command's main axis")
    sim.add_argument("--target", help="Comma-separated target EEH probabilities")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="siet", description=__description__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    parents = [_global_flags()]
    for command in COMMANDS:
        command.add_parser(subparsers, parents)
    return parser


def collect_overrides(args: argparse.Namespace) -> Dict[str, str]:
    """Dotted-key overrides for every flag given on the command line."""
    overrides = {}
    if args.grid is not None:
        overrides[args.grid_key] = args.grid
    for dest, key in FLAG_KEYS.items():
        value = getattr(args, dest, None)
        if value is not None:
            overrides[key] = value
    return overrides


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one subcommand and map failures to exit codes."""
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level, args.log_format)

    try:
        config = load_run_config(args.config, collect_overrides(args))
        if args.dump_config is not None:
            target = Path(args.dump_config) if args.dump_config else config.out_dir / EFFECTIVE_CONFIG_NAME
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(dump_config(config), encoding="utf-8")
            logger.info("cli.config.dumped", path=str(target))

        logger.info("cli.command.start", command=args.command, scenario=config.run.scenario)
        args.handler(config, args)

    except SietException as e:
        logger.error(
            "cli.command.failed",
            command=args.command,
            error_code=e.code.value,
            message=e.message,
            details=e.details
        )
        return int(e.exit_code)

    except Exception as e:
        logger.error("cli.unexpected_exception", command=args.command, error=str(e), exc_info=True)
        return int(ExitCode.UNEXPECTED)

    logger.info("cli.command.done", command=args.command)
    return int(ExitCode.SUCCESS)
