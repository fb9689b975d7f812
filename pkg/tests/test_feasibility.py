"""Tests for thresholds, reduced problems, target inversion and sweeps."""

import math

import numpy as np
import pytest

from siet.core.exceptions import BracketException, ValidationException
from siet.models.schemas import EnergyBudget, FeasibilityConstraints, SweepTable
from siet.services import analytic, feasibility
from siet.services.feasibility import EnergyLevel


def _budget(zeta=1.0, eta=0.3, pm=0.02):
    return EnergyBudget(maintenance_power=pm, availability_factor=zeta, converter_efficiency=eta)


# ============= Thresholds and levels =============

def test_harvest_threshold(basic_budget):
    """Theta = zeta * p_m / eta."""
    assert feasibility.harvest_threshold(basic_budget) == pytest.approx(0.0667, abs=1e-4)
    assert feasibility.harvest_threshold(_budget(zeta=0.5, eta=0.6)) == pytest.approx(0.01667, abs=1e-5)


@pytest.mark.parametrize("zeta, level", [
    (0.5, EnergyLevel.SECONDARY_BATTERY),
    (1.0, EnergyLevel.BASIC_SYSTEM),
    (1.5, EnergyLevel.BATTERY_FREE),
    (10.0, EnergyLevel.BATTERY_FREE),
])
def test_classify_level(zeta, level):
    assert feasibility.classify_level(zeta) is level


def test_classify_level_rejects_nonpositive():
    with pytest.raises(ValidationException):
        feasibility.classify_level(0.0)


def test_level_labels():
    assert [level.label for level in EnergyLevel] == ["secondary_battery", "basic_system", "battery_free"]


# ============= Reduced problems =============

def test_solve_p3_dense_network():
    """lambda_max 1e-2, eta 0.6, zeta 1: EEH about 0.149 at P = 1 W."""
    result = feasibility.solve_p3(_budget(eta=0.6), 1e-2, rho=0.1, epsilon=0.3)
    assert result.density == 1e-2
    assert result.power == 1.0
    assert result.eeh_probability == pytest.approx(0.149, abs=0.01)


def test_solve_p3_increases_with_density():
    budget = _budget(eta=0.6)
    low = feasibility.solve_p3(budget, 1e-2, 0.1, 0.3).eeh_probability
    high = feasibility.solve_p3(budget, 2e-2, 0.1, 0.3).eeh_probability
    assert high > low


def test_solve_p3_sparse_network_is_near_zero():
    assert feasibility.solve_p3(_budget(), 1e-8, 0.1, 0.3).eeh_probability < 1e-5


def test_solve_p3_rejects_nonpositive_density():
    with pytest.raises(ValidationException):
        feasibility.solve_p3(_budget(), 0.0, 0.1, 0.3)


def test_solve_p2_depends_on_lambda_sqrt_p():
    """P_max 4 W with lambda_max 5e-3 matches lambda_max 1e-2 at 1 W."""
    constraints = FeasibilityConstraints(coverage_floor=0.5, power_max=4.0, density_max=5e-3)
    theta = feasibility.harvest_threshold(_budget(eta=0.6))
    p2 = feasibility.solve_p2(theta, constraints, rho=0.1, epsilon=0.3)
    p3 = feasibility.solve_p3(_budget(eta=0.6), 1e-2, rho=0.1, epsilon=0.3)
    assert (p2.density, p2.power) == (5e-3, 4.0)
    assert p2.eeh_probability == pytest.approx(p3.eeh_probability, rel=1e-12)


def test_solve_p2_accepts_budget():
    constraints = FeasibilityConstraints(coverage_floor=0.5, power_max=1.0, density_max=1e-2)
    by_budget = feasibility.solve_p2(_budget(), constraints, 0.1, 0.3)
    by_theta = feasibility.solve_p2(feasibility.harvest_threshold(_budget()), constraints, 0.1, 0.3)
    assert by_budget == by_theta


def test_solve_p2_rejects_nonpositive_theta():
    constraints = FeasibilityConstraints(coverage_floor=0.5, power_max=1.0, density_max=1e-2)
    with pytest.raises(ValidationException):
        feasibility.solve_p2(0.0, constraints, 0.1, 0.3)


# ============= Full problem =============

def test_check_p1_satisfied(default_params):
    """Coverage 0.56 clears a 0.5 floor."""
    constraints = FeasibilityConstraints(coverage_floor=0.5, power_max=1.0, density_max=1e-2)
    report = feasibility.check_p1_constraints(default_params, 1.0, constraints)
    assert report.coverage == pytest.approx(0.5601, abs=1e-4)
    assert report.satisfied
    assert report.violations == []
    assert report.eeh_probability is None


def test_check_p1_reports_each_violation(default_params):
    strict = FeasibilityConstraints(coverage_floor=0.99, power_max=1.0, density_max=1e-2)
    assert feasibility.check_p1_constraints(default_params, 1.0, strict).violations == ["coverage"]
    small = FeasibilityConstraints(coverage_floor=0.5, power_max=0.5, density_max=1e-3)
    assert feasibility.check_p1_constraints(default_params, 1.0, small).violations == ["power", "density"]


def test_check_p1_coverage_ignores_density_and_rho(default_params):
    """Without noise coverage depends on neither lambda nor rho."""
    constraints = FeasibilityConstraints(coverage_floor=0.5, power_max=1.0, density_max=1.0)
    a = feasibility.check_p1_constraints(default_params, 1.0, constraints)
    b = feasibility.check_p1_constraints(default_params.with_overrides(density=1e-3, rho=0.9), 1.0, constraints)
    assert a.coverage == b.coverage


def test_check_p1_includes_eeh(default_params):
    constraints = FeasibilityConstraints(coverage_floor=0.5, power_max=1.0, density_max=1e-2)
    report = feasibility.check_p1_constraints(default_params, 1.0, constraints, theta=1e-3)
    assert report.eeh_probability == pytest.approx(0.7226, abs=1e-3)


def test_evaluate_p1_grid_picks_largest_eeh(default_params):
    constraints = FeasibilityConstraints(coverage_floor=0.5, power_max=1.0, density_max=1e-2)
    report = feasibility.evaluate_p1_grid(default_params, 1.0, 1e-3, constraints, [1e-3, 1e-2], [0.5, 1.0])
    assert len(report.points) == 4
    assert (report.best.density, report.best.power) == (1e-2, 1.0)


def test_evaluate_p1_grid_without_feasible_point(default_params):
    constraints = FeasibilityConstraints(coverage_floor=0.99, power_max=1.0, density_max=1e-2)
    report = feasibility.evaluate_p1_grid(default_params, 1.0, 1e-3, constraints, [1e-2], [1.0])
    assert report.best is None


def test_evaluate_p1_grid_rejects_empty(default_params):
    constraints = FeasibilityConstraints(coverage_floor=0.5, power_max=1.0, density_max=1e-2)
    with pytest.raises(ValidationException):
        feasibility.evaluate_p1_grid(default_params, 1.0, 1e-3, constraints, [], [1.0])


# ============= Target inversion =============

def test_required_density_basic_level(basic_budget):
    """Target 0.8 at zeta 1, eta 0.3 needs just under 0.1 BS/m^2."""
    density = feasibility.required_density(0.8, basic_budget, rho=0.1, epsilon=0.3)
    assert 0.090 <= density <= 0.100


def test_required_density_better_converter_needs_less(basic_budget):
    a = feasibility.required_density(0.8, basic_budget, 0.1, 0.3)
    b = feasibility.required_density(0.8, _budget(eta=0.6), 0.1, 0.3)
    assert b < a
    assert b / a == pytest.approx(math.sqrt(0.5), rel=1e-6)


@pytest.mark.parametrize("density", list(np.logspace(-4, -1, 7)))
def test_required_density_inverts_closed_form(basic_budget, density):
    theta = feasibility.harvest_threshold(basic_budget)
    target = analytic.eeh_closed_form(density, theta, 0.1, 0.3)
    assert feasibility.required_density(target, basic_budget, 0.1, 0.3) == pytest.approx(density, rel=1e-6)


def test_required_density_tiny_target(basic_budget):
    density = feasibility.required_density(1e-6, basic_budget, 0.1, 0.3)
    assert 0 < density < 1e-6


@pytest.mark.parametrize("target", [0.0, 1.0, 1.2])
def test_required_density_rejects_target_outside_unit_interval(basic_budget, target):
    with pytest.raises(ValidationException):
        feasibility.required_density(target, basic_budget, 0.1, 0.3)


def test_required_density_above_supremum(basic_budget):
    """rho = 1 caps the EEH probability at 1 - epsilon."""
    with pytest.raises(BracketException):
        feasibility.required_density(0.8, basic_budget, rho=1.0, epsilon=0.3)


def test_feasible_availability_factor():
    """About 0.078 at lambda_max 1e-2, eta 0.6, with EEH 0.5 there."""
    zeta = feasibility.feasible_availability_factor(0.02, 0.6, 1e-2, 0.1, 0.3)
    assert 0.07 <= zeta <= 0.09
    theta = zeta * 0.02 / 0.6
    assert analytic.eeh_closed_form(1e-2, theta, 0.1, 0.3) == pytest.approx(0.5, abs=1e-6)


def test_feasible_availability_factor_sparse_network_is_positive():
    zeta = feasibility.feasible_availability_factor(0.02, 0.6, 1e-4, 0.1, 0.3)
    assert 0 < zeta < 1e-4


def test_feasible_availability_factor_unreachable_floor():
    assert feasibility.feasible_availability_factor(0.02, 0.6, 1e-2, 1.0, 0.3, floor=0.99) == 0.0


# ============= Level assessment =============

def test_assess_levels_dense_network_infeasible():
    """No level reaches 0.8 at 1e-2 BS/m^2."""
    rows = feasibility.assess_levels(0.02, [0.3, 0.6], 1e-2, [0.8], rho=0.1, epsilon=0.3)
    assert len(rows) == 6
    assert not any(row.feasible for row in rows)
    assert all(row.required_density > 1e-2 for row in rows)


def test_assess_levels_basic_level_feasible_at_higher_density():
    rows = feasibility.assess_levels(0.02, [0.3], 1e-1, [0.8], rho=0.1, epsilon=0.3)
    verdicts = {row.level: row.feasible for row in rows}
    assert verdicts == {"secondary_battery": True, "basic_system": True, "battery_free": False}


def test_assess_levels_unreachable_target():
    rows = feasibility.assess_levels(
        0.02, [0.3], 1e-2, [0.8], rho=1.0, epsilon=0.3, levels=[EnergyLevel.BASIC_SYSTEM]
    )
    assert rows[0].required_density is None
    assert not rows[0].feasible


def test_assess_budget_matches_level_with_same_zeta():
    """A budget at zeta = 10 reads like the battery_free level under its own label."""
    level_rows = feasibility.assess_levels(
        0.02, [0.3], 1e-1, [0.5, 0.8], rho=0.1, epsilon=0.3, levels=[EnergyLevel.BATTERY_FREE]
    )
    budget_rows = feasibility.assess_budget(_budget(zeta=10.0), "configured", 1e-1, [0.5, 0.8], rho=0.1, epsilon=0.3)
    assert [row.level for row in budget_rows] == ["configured", "configured"]
    assert [row.model_dump(exclude={"level"}) for row in budget_rows] == [
        row.model_dump(exclude={"level"}) for row in level_rows
    ]


# ============= Sweeps =============

def test_sweep_fig2_shape_and_order():
    table = feasibility.sweep_fig2()
    assert table.axis_name == "lambda_sqrt_p"
    assert len(table.axis_values) == 61
    assert list(table.series) == ["rho=0.1", "rho=0.5", "rho=0.9"]
    for values in table.series.values():
        assert values[0] == 0.0
        assert all(b >= a for a, b in zip(values, values[1:]))
    # Less power to the decoder means more to harvest.
    assert all(a >= b for a, b in zip(table.series["rho=0.1"], table.series["rho=0.9"]))


def test_sweep_fig2_anchor():
    table = feasibility.sweep_fig2([1e-2], rho_list=[0.1])
    assert table.series["rho=0.1"][0] == pytest.approx(0.7226, abs=1e-3)


def test_sweep_fig3_decreasing_in_zeta():
    table = feasibility.sweep_fig3()
    assert table.axis_name == "zeta"
    assert len(table.series) == 4
    for values in table.series.values():
        assert all(b <= a for a, b in zip(values, values[1:]))


def test_sweep_fig3_dense_and_sparse_values():
    table = feasibility.sweep_fig3([0.01, 0.5, 1.0])
    dense = table.series["lambda_max=0.01,eta=0.6"]
    assert dense[1] == pytest.approx(0.2098, abs=1e-3)
    assert 0.15 <= max(dense[1:]) <= 0.25
    assert max(table.series["lambda_max=0.0001,eta=0.6"]) < 0.2
    assert table.series["lambda_max=0.0001,eta=0.6"][0] == pytest.approx(0.015, abs=1e-3)


def test_sweep_fig4_scales_with_sqrt_theta():
    zetas = [0.25, 1.0]
    low = feasibility.sweep_fig4(zetas, target_eeh_list=[0.8], eta=0.3)
    high = feasibility.sweep_fig4(zetas, target_eeh_list=[0.8], eta=0.6)
    series_low = low.series["target=0.8,eta=0.3"]
    series_high = high.series["target=0.8,eta=0.6"]
    assert series_low[1] / series_low[0] == pytest.approx(2.0, rel=1e-6)
    assert series_high[1] / series_low[1] == pytest.approx(math.sqrt(0.5), rel=1e-6)


def test_sweep_fig4_higher_target_needs_more_density():
    table = feasibility.sweep_fig4([0.5, 1.0])
    assert all(
        a < b < c
        for a, b, c in zip(
            table.series["target=0.5,eta=0.3"],
            table.series["target=0.8,eta=0.3"],
            table.series["target=0.9,eta=0.3"],
        )
    )


def test_sweeps_reject_bad_axis():
    with pytest.raises(ValidationException):
        feasibility.sweep_fig3([])
    with pytest.raises(ValidationException):
        feasibility.sweep_fig4([0.0, 1.0])


# ============= Merging =============

def test_merge_tables_combines_series():
    a = feasibility.sweep_fig4([0.5, 1.0], target_eeh_list=[0.8], eta=0.3)
    b = feasibility.sweep_fig4([0.5, 1.0], target_eeh_list=[0.8], eta=0.6)
    merged = feasibility.merge_tables([a, b])
    assert list(merged.series) == ["target=0.8,eta=0.3", "target=0.8,eta=0.6"]
    assert merged.metadata["eta"] == 0.6


def test_merge_tables_errors():
    a = SweepTable(axis_name="zeta", axis_values=[1.0, 2.0], series={"s": [0.1, 0.2]})
    other_axis = SweepTable(axis_name="zeta", axis_values=[1.0, 3.0], series={"t": [0.1, 0.2]})
    with pytest.raises(ValidationException):
        feasibility.merge_tables([])
    with pytest.raises(ValidationException):
        feasibility.merge_tables([a, other_axis])
    with pytest.raises(ValidationException):
        feasibility.merge_tables([a, a])
