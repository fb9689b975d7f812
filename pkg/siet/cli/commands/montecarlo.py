"""montecarlo: cross-validate analytic values against the simulator."""

import argparse
from typing import Dict, List, Optional

import pandas as pd
import structlog

from siet.cli.output import write_csv
from siet.cli.run_config import RunConfig
from siet.config import settings
from siet.core.exceptions import OracleDisagreementException
from siet.models.schemas import EehQuery, ProbabilityEstimate
from siet.services import analytic, montecarlo

logger = structlog.get_logger()

GRID_KEY = "grid.theta"

COLUMNS = [
    "quantity",
    "analytic",
    "mc_value",
    "ci_halfwidth",
    "agree_flag",
    "trials",
    "empty_resamples",
    "truncated_tail_mean",
]


def agrees(analytic_value: float, estimate: ProbabilityEstimate, factor: float) -> bool:
    return abs(analytic_value - estimate.value) <= factor * estimate.ci_halfwidth


def _row(quantity: str, analytic_value: float, estimate: ProbabilityEstimate, factor: float) -> Dict:
    return {
        "quantity": quantity,
        "analytic": analytic_value,
        "mc_value": estimate.value,
        "ci_halfwidth": estimate.ci_halfwidth,
        "agree_flag": agrees(analytic_value, estimate, factor),
        "trials": estimate.trials,
        "empty_resamples": estimate.empty_resamples,
        "truncated_tail_mean": estimate.truncated_tail_mean,
    }


def cmd_montecarlo(config: RunConfig, factor: Optional[float] = None) -> pd.DataFrame:
    """
    Coverage at T, EEH at every Theta, and the interference CCDF at every
    Theta, each as analytic value against the Monte Carlo estimate.
    """
    factor = settings.AGREEMENT_FACTOR if factor is None else factor
    params = config.system_params()
    sim = config.sim_config()
    T = config.thresholds.T
    thetas: List[float] = config.grid.theta or [config.thresholds.theta]

    rows = [_row(
        f"coverage(T={T:g})",
        analytic.coverage_probability(params, T),
        montecarlo.estimate_coverage(params, T, sim),
        factor,
    )]

    for theta in thetas:
        rows.append(_row(
            f"eeh(theta={theta:g})",
            analytic.eeh_probability(EehQuery(params=params, theta=theta)),
            montecarlo.estimate_eeh(params, theta, sim),
            factor,
        ))

    ccdf = montecarlo.estimate_interference_ccdf(params, sorted(thetas), sim)
    for level, estimate in zip(sorted(thetas), ccdf):
        rows.append(_row(
            f"interference_ccdf(x={level:g})",
            1.0 - analytic.interference_cdf_at_origin(params, level),
            estimate,
            factor,
        ))

    frame = pd.DataFrame(rows, columns=COLUMNS)
    logger.info(
        "cli.montecarlo.done",
        rows=len(frame),
        disagreements=int((~frame["agree_flag"]).sum()),
        seed=sim.seed,
        trials=sim.trials
    )
    return frame


def run(config: RunConfig, args: argparse.Namespace) -> None:
    frame = cmd_montecarlo(config)
    write_csv(frame, config.out_dir / "montecarlo.csv")

    failed = frame.loc[~frame["agree_flag"], "quantity"].tolist()
    if failed:
        logger.warning("cli.montecarlo.disagreement", quantities=failed)
        if args.strict:
            raise OracleDisagreementException(failed)


def add_parser(subparsers, parents) -> None:
    parser = subparsers.add_parser(
        "montecarlo",
        parents=parents,
        help="Compare analytic probabilities with Monte Carlo estimates",
    )
    parser.add_argument(
        "--strict",
        action="store_true",
        help="Exit with code 4 when any quantity disagrees",
    )
    parser.set_defaults(handler=run, grid_key=GRID_KEY)
