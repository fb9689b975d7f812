"""eeh: average efficient-energy-harvesting probability over a grid of thresholds."""

import argparse
from typing import List

import pandas as pd
import structlog

from siet.cli.output import write_csv
from siet.cli.run_config import RunConfig
from siet.core.exceptions import ValidationException
from siet.models.schemas import EehQuery
from siet.services import analytic

logger = structlog.get_logger()

GRID_KEY = "grid.theta"


def theta_grid(config: RunConfig) -> List[float]:
    grid = config.grid.theta if config.grid.theta is not None else [config.thresholds.theta]
    if not grid:
        raise ValidationException("empty grid", details={"key": GRID_KEY})
    return grid


def cmd_eeh(config: RunConfig) -> pd.DataFrame:
    """
    One row per Theta (watts): theta, P_eeh_analytic from numerical
    inversion and, when alpha = 4 without noise, P_eeh_closed.
    """
    params = config.system_params()
    closed = analytic.closed_form_applicable(params)

    rows = []
    for theta in theta_grid(config):
        query = EehQuery(params=params, theta=theta)
        row = {"theta": theta, "P_eeh_analytic": analytic.eeh_probability(query)}
        if closed:
            row["P_eeh_closed"] = analytic.eeh_probability_closed_alpha4(query)
        rows.append(row)

    logger.info("cli.eeh.done", rows=len(rows), closed_form=closed)
    return pd.DataFrame(rows)


def run(config: RunConfig, args: argparse.Namespace) -> None:
    write_csv(cmd_eeh(config), config.out_dir / "eeh.csv")


def add_parser(subparsers, parents) -> None:
    parser = subparsers.add_parser(
        "eeh",
        parents=parents,
        help="EEH probability against the harvesting threshold",
    )
    parser.set_defaults(handler=run, grid_key=GRID_KEY)
