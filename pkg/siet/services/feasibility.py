"""
Feasibility of harvesting from small cell base stations.

Threshold model Theta = zeta * p_m / eta, the constrained EEH maximization
and its reductions, target inversion for the required density, and the
parameter sweeps behind the feasibility figures.
"""

import math
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
import structlog

from siet.core import numerics
from siet.core.exceptions import BracketException, ErrorCode, NumericalException, ValidationException
from siet.models.schemas import (
    EehQuery,
    EnergyBudget,
    FeasibilityConstraints,
    LevelAssessment,
    OptimalDeployment,
    P1GridReport,
    P1Report,
    SweepTable,
    SystemParams,
)
from siet.services import analytic

logger = structlog.get_logger()

# Standard density normalization: every base station transmits 1 W.
STANDARD_POWER = 1.0

DEFAULT_ZETA_GRID = tuple(np.logspace(-2, math.log10(2.0), 60))
DEFAULT_FIG2_GRID = tuple(np.linspace(0.0, 0.03, 61))
DEFAULT_RHO_LIST = (0.1, 0.5, 0.9)
DEFAULT_TARGETS = (0.5, 0.8, 0.9)
DEFAULT_LAMBDA_MAX_LIST = (1e-4, 1e-2)
DEFAULT_ETA_LIST = (0.3, 0.6)
FEASIBLE_EEH_FLOOR = 0.5

# Root searches run in log10 space; brackets widen by this step.
LOG_BRACKET = (-12.0, 4.0)
LOG_BRACKET_STEP = 8.0
LOG_BRACKET_LIMIT = 300.0
ROOT_REL_TOL = 1e-10


class EnergyLevel(float, Enum):
    """Energy-supply levels and the availability factor used for each."""

    SECONDARY_BATTERY = 0.5
    BASIC_SYSTEM = 1.0
    BATTERY_FREE = 10.0

    @property
    def label(self) -> str:
        return self.name.lower()


def classify_level(zeta: float) -> EnergyLevel:
    """zeta < 1 charges a secondary battery, zeta = 1 sustains the basic system, above is battery-free."""
    if not zeta > 0:
        raise ValidationException("zeta must be positive", details={"zeta": zeta})
    if zeta < 1:
        return EnergyLevel.SECONDARY_BATTERY
    if zeta == 1:
        return EnergyLevel.BASIC_SYSTEM
    return EnergyLevel.BATTERY_FREE


def harvest_threshold(budget: EnergyBudget) -> float:
    """Theta = zeta * p_m / eta, in watts."""
    return budget.availability_factor * budget.maintenance_power / budget.converter_efficiency


def _theta(source: Union[EnergyBudget, float]) -> float:
    if isinstance(source, EnergyBudget):
        return harvest_threshold(source)
    if not source > 0:
        raise ValidationException("theta must be positive", details={"theta": source})
    return float(source)


def _closed_eeh(density: float, theta: float, rho: float, epsilon: float, power: float = STANDARD_POWER) -> float:
    return analytic.eeh_closed_form(density * math.sqrt(power), theta, rho, epsilon)


def _log_root(f, target: float, what: str) -> float:
    """
    Solve f(x) = target for increasing f over log10-space, widening the
    default bracket until it straddles the target.
    """
    lo, hi = LOG_BRACKET
    tol = ROOT_REL_TOL * abs(target)
    while f(lo) > target and lo > -LOG_BRACKET_LIMIT:
        lo -= LOG_BRACKET_STEP
    while f(hi) < target and hi < LOG_BRACKET_LIMIT:
        hi += LOG_BRACKET_STEP
    try:
        return numerics.find_root_monotone(f, target, (lo, hi), tol)
    except BracketException:
        logger.error(f"feasibility.{what}.unreachable", target=target, lo=lo, hi=hi)
        raise


# ============= Reduced problems =============

def solve_p3(
    budget: EnergyBudget,
    density_max: float,
    rho: float,
    epsilon: float
) -> OptimalDeployment:
    """
    Maximize the closed-form EEH probability over the standard density
    lambda_s <= density_max at P = 1 W. The objective increases in lambda_s,
    so the optimum is at density_max.

    Raises:
        NumericalException: the objective fails to increase at density_max
    """
    if not density_max > 0:
        raise ValidationException("density_max must be positive", details={"density_max": density_max})
    theta = harvest_threshold(budget)
    value = _closed_eeh(density_max, theta, rho, epsilon)
    below = _closed_eeh(density_max / 2.0, theta, rho, epsilon)

    if below > value:
        raise NumericalException(
            ErrorCode.DOMAIN_ERROR,
            "EEH objective is not increasing in density",
            details={"density_max": density_max, "value": value, "half_density_value": below}
        )

    return OptimalDeployment(density=density_max, power=STANDARD_POWER, eeh_probability=value)


def solve_p2(
    source: Union[EnergyBudget, float],
    constraints: FeasibilityConstraints,
    rho: float,
    epsilon: float
) -> OptimalDeployment:
    """
    Maximize the closed-form EEH probability over lambda <= lambda_max and
    P <= P_max. Both enter only through lambda * sqrt(P), so the optimum
    takes both maxima together.

    Args:
        source: EnergyBudget, or Theta in watts
    """
    theta = _theta(source)
    value = _closed_eeh(constraints.density_max, theta, rho, epsilon, constraints.power_max)
    return OptimalDeployment(
        density=constraints.density_max,
        power=constraints.power_max,
        eeh_probability=min(1.0, max(0.0, value)),
    )


# ============= Full problem as a report =============

def _eeh_any_regime(params: SystemParams, theta: float) -> float:
    query = EehQuery(params=params, theta=theta)
    if analytic.closed_form_applicable(params):
        return analytic.eeh_probability_closed_alpha4(query)
    return analytic.eeh_probability(query)


def check_p1_constraints(
    params: SystemParams,
    T: float,
    constraints: FeasibilityConstraints,
    theta: Optional[float] = None
) -> P1Report:
    """
    Evaluate coverage at params and report the coverage, power and density
    constraints one by one. With theta given the EEH objective is included.

    Raises:
        QuadratureException: coverage integral did not converge
    """
    coverage = analytic.coverage_probability(params, T)
    report = P1Report(
        density=params.density,
        power=params.power,
        coverage=coverage,
        coverage_ok=coverage >= constraints.coverage_floor,
        power_ok=params.power <= constraints.power_max,
        density_ok=params.density <= constraints.density_max,
        eeh_probability=None if theta is None else _eeh_any_regime(params, theta),
    )
    logger.debug(
        "feasibility.p1.checked",
        density=params.density,
        power=params.power,
        coverage=coverage,
        violations=report.violations
    )
    return report


def evaluate_p1_grid(
    params: SystemParams,
    T: float,
    theta: float,
    constraints: FeasibilityConstraints,
    density_grid: Sequence[float],
    power_grid: Sequence[float]
) -> P1GridReport:
    """
    Evaluate coverage, EEH and every constraint over a density x power grid
    and pick the feasible point with the largest EEH probability.
    """
    if len(density_grid) == 0 or len(power_grid) == 0:
        raise ValidationException("empty grid")

    points: List[P1Report] = []
    for density in density_grid:
        for power in power_grid:
            point = params.with_overrides(density=density, power=power)
            points.append(check_p1_constraints(point, T, constraints, theta=theta))

    feasible = [p for p in points if p.satisfied]
    best = max(feasible, key=lambda p: p.eeh_probability) if feasible else None

    logger.info(
        "feasibility.p1.grid",
        points=len(points),
        feasible=len(feasible),
        best_density=best.density if best else None,
        best_power=best.power if best else None
    )
    return P1GridReport(T=T, theta=theta, points=points, best=best)


# ============= Target inversion =============

def required_density(
    target_eeh: float,
    budget: EnergyBudget,
    rho: float,
    epsilon: float
) -> float:
    """
    Standard density at which the closed-form EEH probability equals
    target_eeh, to 1e-10 relative.

    Raises:
        ValidationException: target outside (0, 1)
        BracketException: target above the reachable supremum (1 - epsilon when rho = 1)
    """
    if not 0 < target_eeh < 1:
        raise ValidationException("target_eeh must lie in (0, 1)", details={"target_eeh": target_eeh})
    theta = harvest_threshold(budget)

    def f(log_density: float) -> float:
        return _closed_eeh(10.0 ** log_density, theta, rho, epsilon)

    density = 10.0 ** _log_root(f, target_eeh, "required_density")
    logger.debug("feasibility.required_density.success", target=target_eeh, theta=theta, density=density)
    return density


def feasible_availability_factor(
    maintenance_power: float,
    converter_efficiency: float,
    density_max: float,
    rho: float,
    epsilon: float,
    floor: float = FEASIBLE_EEH_FLOOR
) -> float:
    """
    Largest availability factor zeta for which the EEH probability at
    density_max still reaches floor. Returns 0.0 when no positive zeta does.
    """
    if not 0 < floor < 1:
        raise ValidationException("floor must lie in (0, 1)", details={"floor": floor})

    def eeh_at(log_zeta: float) -> float:
        theta = 10.0 ** log_zeta * maintenance_power / converter_efficiency
        return _closed_eeh(density_max, theta, rho, epsilon)

    lo = LOG_BRACKET[0] - LOG_BRACKET_LIMIT / 2
    if eeh_at(lo) < floor:
        logger.info("feasibility.availability.none", density_max=density_max, eta=converter_efficiency)
        return 0.0

    # EEH decreases in zeta; solve the increasing -EEH(zeta) = -floor.
    zeta = 10.0 ** _log_root(lambda x: -eeh_at(x), -floor, "availability")
    logger.debug("feasibility.availability.success", density_max=density_max, eta=converter_efficiency, zeta=zeta)
    return zeta


def assess_budget(
    budget: EnergyBudget,
    label: str,
    density_max: float,
    targets: Iterable[float],
    rho: float,
    epsilon: float
) -> List[LevelAssessment]:
    """One row per target for a single energy budget."""
    achievable = solve_p3(budget, density_max, rho, epsilon).eeh_probability
    rows = []
    for target in targets:
        try:
            needed = required_density(target, budget, rho, epsilon)
        except BracketException:
            needed = None
        rows.append(LevelAssessment(
            level=label,
            zeta=budget.availability_factor,
            eta=budget.converter_efficiency,
            theta=harvest_threshold(budget),
            density_max=density_max,
            eeh_at_density_max=achievable,
            target=target,
            required_density=needed,
            feasible=needed is not None and needed <= density_max,
        ))
    return rows


def assess_levels(
    maintenance_power: float,
    eta_list: Iterable[float],
    density_max: float,
    targets: Iterable[float],
    rho: float,
    epsilon: float,
    levels: Iterable[EnergyLevel] = tuple(EnergyLevel)
) -> List[LevelAssessment]:
    """
    For every energy level, efficiency and target: EEH at density_max,
    the density the target needs, and whether density_max covers it.
    """
    targets = list(targets)
    rows = []
    for eta in eta_list:
        for level in levels:
            budget = EnergyBudget(
                maintenance_power=maintenance_power,
                availability_factor=level.value,
                converter_efficiency=eta,
            )
            rows.extend(assess_budget(budget, level.label, density_max, targets, rho, epsilon))
    return rows


# ============= Sweeps =============

def _label(**parts: float) -> str:
    return ",".join(f"{k}={v:g}" for k, v in parts.items())


def _check_axis(values: Sequence[float], allow_zero: bool) -> List[float]:
    axis = [float(v) for v in values]
    if not axis:
        raise ValidationException("empty grid")
    if any(v < 0 or (v == 0 and not allow_zero) for v in axis):
        raise ValidationException("grid values must be positive", details={"grid": axis})
    return axis


def sweep_fig2(
    lambda_sqrt_p_grid: Sequence[float] = DEFAULT_FIG2_GRID,
    rho_list: Sequence[float] = DEFAULT_RHO_LIST,
    epsilon: float = 0.3,
    theta: float = 1e-3
) -> SweepTable:
    """EEH probability against lambda * sqrt(P), one series per rho."""
    axis = _check_axis(lambda_sqrt_p_grid, allow_zero=True)
    grid = np.asarray(axis)
    series: Dict[str, List[float]] = {}
    for rho in rho_list:
        values = analytic.eeh_closed_form(grid, theta, rho, epsilon)
        series[_label(rho=rho)] = [float(v) for v in np.atleast_1d(values)]

    return SweepTable(
        axis_name="lambda_sqrt_p",
        axis_values=axis,
        series=series,
        metadata={"figure": 2, "epsilon": epsilon, "theta": theta, "rho": list(rho_list)},
    )


def sweep_fig3(
    zeta_grid: Sequence[float] = DEFAULT_ZETA_GRID,
    lambda_max_list: Sequence[float] = DEFAULT_LAMBDA_MAX_LIST,
    eta_list: Sequence[float] = DEFAULT_ETA_LIST,
    rho: float = 0.1,
    epsilon: float = 0.3,
    maintenance_power: float = 0.02
) -> SweepTable:
    """Maximal EEH probability (at lambda_max, P = 1 W) against zeta."""
    axis = _check_axis(zeta_grid, allow_zero=False)
    series: Dict[str, List[float]] = {}
    for density_max in lambda_max_list:
        for eta in eta_list:
            values = []
            for zeta in axis:
                budget = EnergyBudget(
                    maintenance_power=maintenance_power,
                    availability_factor=zeta,
                    converter_efficiency=eta,
                )
                values.append(solve_p3(budget, density_max, rho, epsilon).eeh_probability)
            series[_label(lambda_max=density_max, eta=eta)] = values

    return SweepTable(
        axis_name="zeta",
        axis_values=axis,
        series=series,
        metadata={
            "figure": 3,
            "rho": rho,
            "epsilon": epsilon,
            "maintenance_power": maintenance_power,
            "lambda_max": list(lambda_max_list),
            "eta": list(eta_list),
        },
    )


def sweep_fig4(
    zeta_grid: Sequence[float] = DEFAULT_ZETA_GRID,
    target_eeh_list: Sequence[float] = DEFAULT_TARGETS,
    eta: float = 0.3,
    rho: float = 0.1,
    epsilon: float = 0.3,
    maintenance_power: float = 0.02
) -> SweepTable:
    """Required standard density against zeta, one series per target EEH probability."""
    axis = _check_axis(zeta_grid, allow_zero=False)
    series: Dict[str, List[float]] = {}
    for target in target_eeh_list:
        values = []
        for zeta in axis:
            budget = EnergyBudget(
                maintenance_power=maintenance_power,
                availability_factor=zeta,
                converter_efficiency=eta,
            )
            values.append(required_density(target, budget, rho, epsilon))
        series[_label(target=target, eta=eta)] = values

    return SweepTable(
        axis_name="zeta",
        axis_values=axis,
        series=series,
        metadata={
            "figure": 4,
            "eta": eta,
            "rho": rho,
            "epsilon": epsilon,
            "maintenance_power": maintenance_power,
            "targets": list(target_eeh_list),
        },
    )


def merge_tables(tables: Sequence[SweepTable]) -> SweepTable:
    """Ordered merge of tables sharing one axis; later metadata keys win on conflict."""
    if not tables:
        raise ValidationException("nothing to merge")
    first = tables[0]
    series: Dict[str, List[float]] = {}
    metadata: Dict = {}
    for table in tables:
        if table.axis_name != first.axis_name or table.axis_values != first.axis_values:
            raise ValidationException(
                "tables do not share an axis",
                details={"axis": table.axis_name, "expected": first.axis_name}
            )
        for name, values in table.series.items():
            if name in series:
                raise ValidationException("duplicate series", details={"series": name})
            series[name] = values
        metadata.update(table.metadata)
    return SweepTable(axis_name=first.axis_name, axis_values=first.axis_values, series=series, metadata=metadata)
