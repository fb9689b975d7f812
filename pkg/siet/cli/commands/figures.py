"""figures: sweep data and gnuplot scripts for the three feasibility figures."""

import argparse
from pathlib import Path
from typing import Dict, List, Sequence

import structlog

from siet.cli.output import write_figure
from siet.cli.run_config import RunConfig
from siet.core.exceptions import ValidationException
from siet.models.schemas import SweepTable
from siet.services import feasibility

logger = structlog.get_logger()

GRID_KEY = "grid.zeta"
FIGURES = (2, 3, 4)
TITLES = {
    2: "EEH probability over lambda*sqrt(P) for several power splitting factors",
    3: "Maximal EEH probability over the availability factor",
    4: "Required BS density over the availability factor",
}


def parse_which(value: str) -> List[int]:
    """'all' or a comma-separated subset of 2, 3, 4."""
    if value is None or value.strip().lower() == "all":
        return list(FIGURES)
    try:
        numbers = [int(p) for p in value.split(",") if p.strip()]
    except ValueError as e:
        raise ValidationException("unknown figure number", details={"which": value}) from e
    unknown = [n for n in numbers if n not in FIGURES]
    if unknown or not numbers:
        raise ValidationException("unknown figure number", details={"which": value, "known": list(FIGURES)})
    return numbers


def _zeta_grid(config: RunConfig) -> Sequence[float]:
    return config.grid.zeta if config.grid.zeta is not None else feasibility.DEFAULT_ZETA_GRID


def _eta_list(config: RunConfig) -> Sequence[float]:
    if config.grid.eta:
        return config.grid.eta
    if config.energy.eta is not None:
        return [config.energy.eta]
    return feasibility.DEFAULT_ETA_LIST


def build_figure(config: RunConfig, number: int) -> SweepTable:
    s = config.system
    g = config.grid
    eta_list = _eta_list(config)

    if number == 2:
        return feasibility.sweep_fig2(
            feasibility.DEFAULT_FIG2_GRID,
            g.rho or feasibility.DEFAULT_RHO_LIST,
            epsilon=s.epsilon,
            theta=config.thresholds.theta,
        )
    if number == 3:
        return feasibility.sweep_fig3(
            _zeta_grid(config),
            g.lambda_max or feasibility.DEFAULT_LAMBDA_MAX_LIST,
            eta_list,
            rho=s.rho,
            epsilon=s.epsilon,
            maintenance_power=config.energy.pm,
        )
    if number == 4:
        return feasibility.merge_tables([
            feasibility.sweep_fig4(
                _zeta_grid(config),
                g.targets or feasibility.DEFAULT_TARGETS,
                eta=eta,
                rho=s.rho,
                epsilon=s.epsilon,
                maintenance_power=config.energy.pm,
            )
            for eta in eta_list
        ])
    raise ValidationException("unknown figure number", details={"which": number})


def cmd_figures(config: RunConfig, which: Sequence[int]) -> Dict[int, Path]:
    """Write fig{N}.csv and fig{N}.plot for each requested figure; returns the script paths."""
    written = {}
    for number in which:
        table = build_figure(config, number)
        written[number] = write_figure(table, number, config.out_dir, TITLES[number])
    logger.info("cli.figures.done", figures=list(written), out=str(config.out_dir))
    return written


def run(config: RunConfig, args: argparse.Namespace) -> None:
    cmd_figures(config, parse_which(args.which))


def add_parser(subparsers, parents) -> None:
    parser = subparsers.add_parser(
        "figures",
        parents=parents,
        help="Regenerate figure data (CSV) and plot scripts",
    )
    parser.add_argument(
        "--which",
        default="all",
        help="Figures to produce: all, or a comma-separated subset of 2,3,4",
    )
    parser.set_defaults(handler=run, grid_key=GRID_KEY)
