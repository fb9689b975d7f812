"""coverage: average coverage probability over a grid of SINR thresholds."""

import argparse
from typing import List

import pandas as pd
import structlog

from siet.cli.output import write_csv
from siet.cli.run_config import RunConfig
from siet.core.exceptions import ValidationException
from siet.services import analytic

logger = structlog.get_logger()

GRID_KEY = "grid.T"


def threshold_grid(config: RunConfig) -> List[float]:
    grid = config.grid.T if config.grid.T is not None else [config.thresholds.T]
    if not grid:
        raise ValidationException("empty grid", details={"key": GRID_KEY})
    return grid


def cmd_coverage(config: RunConfig) -> pd.DataFrame:
    """
    One row per threshold: T, P_c_analytic and, when alpha = 4 without
    noise, P_c_closed.
    """
    params = config.system_params()
    closed = analytic.closed_form_applicable(params)

    rows = []
    for T in threshold_grid(config):
        row = {"T": T, "P_c_analytic": analytic.coverage_probability(params, T)}
        if closed:
            row["P_c_closed"] = analytic.coverage_probability_closed_alpha4(T)
        rows.append(row)

    logger.info("cli.coverage.done", rows=len(rows), closed_form=closed)
    return pd.DataFrame(rows)


def run(config: RunConfig, args: argparse.Namespace) -> None:
    write_csv(cmd_coverage(config), config.out_dir / "coverage.csv")


def add_parser(subparsers, parents) -> None:
    parser = subparsers.add_parser(
        "coverage",
        parents=parents,
        help="Coverage probability against the SINR threshold",
    )
    parser.set_defaults(handler=run, grid_key=GRID_KEY)
