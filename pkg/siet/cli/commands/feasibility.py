"""feasibility: verdict per energy-supply level against the density cap."""

import argparse
import sys
from typing import List, Optional, TextIO

import pandas as pd
import structlog

from siet.cli.output import write_csv
from siet.cli.run_config import RunConfig
from siet.services import feasibility

logger = structlog.get_logger()

GRID_KEY = "grid.targets"
CONFIGURED_LABEL = "configured"


def cmd_feasibility(config: RunConfig) -> pd.DataFrame:
    """
    One row per (efficiency, level, target): EEH at lambda_max, the density
    the target needs, the verdict, and the largest zeta still reaching
    P_eeh >= 0.5 at lambda_max for that efficiency. The configured
    energy.zeta is assessed as an extra "configured" level.
    """
    s = config.system
    constraints = config.feasibility_constraints()
    eta_list: List[float] = config.grid.eta or [config.configured_eta]
    targets = config.grid.targets or [feasibility.FEASIBLE_EEH_FLOOR]

    assessments = feasibility.assess_levels(
        config.energy.pm,
        eta_list,
        constraints.density_max,
        targets,
        rho=s.rho,
        epsilon=s.epsilon,
    )
    for eta in eta_list:
        assessments.extend(feasibility.assess_budget(
            config.energy_budget(eta=eta),
            CONFIGURED_LABEL,
            constraints.density_max,
            targets,
            rho=s.rho,
            epsilon=s.epsilon,
        ))
    frame = pd.DataFrame([row.model_dump() for row in assessments])

    max_zeta = {
        eta: feasibility.feasible_availability_factor(
            config.energy.pm, eta, constraints.density_max, s.rho, s.epsilon
        )
        for eta in eta_list
    }
    frame["max_feasible_zeta"] = frame["eta"].map(max_zeta)

    logger.info(
        "cli.feasibility.done",
        rows=len(frame),
        feasible=int(frame["feasible"].sum()),
        density_max=constraints.density_max,
        zeta=config.energy.zeta
    )
    return frame


def render_report(frame: pd.DataFrame, stream: Optional[TextIO] = None) -> None:
    """Human-readable summary of cmd_feasibility output; stdout by default."""
    stream = stream or sys.stdout
    for row in frame.itertuples(index=False):
        needed = "unreachable" if pd.isna(row.required_density) else f"{row.required_density:.4g} BS/m^2"
        verdict = "FEASIBLE" if row.feasible else "infeasible"
        stream.write(
            f"{row.level:<18} zeta={row.zeta:<5g} eta={row.eta:<4g} "
            f"P_eeh(lambda_max={row.density_max:g})={row.eeh_at_density_max:.4f}  "
            f"target {row.target:g} needs {needed}  -> {verdict}\n"
        )
    for eta, zeta in frame.groupby("eta")["max_feasible_zeta"].first().items():
        stream.write(f"eta={eta:g}: largest zeta with P_eeh >= 0.5 is {zeta:.4g}\n")


def run(config: RunConfig, args: argparse.Namespace) -> None:
    frame = cmd_feasibility(config)
    write_csv(frame, config.out_dir / "feasibility.csv")
    render_report(frame)


def add_parser(subparsers, parents) -> None:
    parser = subparsers.add_parser(
        "feasibility",
        parents=parents,
        help="Feasibility verdict for each energy-supply level",
    )
    parser.set_defaults(handler=run, grid_key=GRID_KEY)
