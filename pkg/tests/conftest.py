"""Pytest configuration and fixtures."""

import pytest

from siet.models.schemas import EnergyBudget, SimConfig, SystemParams


@pytest.fixture
def default_params():
    """Dense reference network: lambda=1e-2, P=1 W, alpha=4, no noise."""
    return SystemParams(density=1e-2, power=1.0, alpha=4.0, noise=0.0, rho=0.1, epsilon=0.3)


@pytest.fixture
def interference_limited_params(default_params):
    """Same network, kept separate so tests can state the regime they rely on."""
    return default_params


@pytest.fixture
def noisy_params(default_params):
    """alpha=4 with noise strong enough to move coverage visibly."""
    return default_params.with_overrides(noise=5e-4, rho=0.5)


@pytest.fixture
def basic_budget():
    """p_m = 0.02 W, zeta = 1, eta = 0.3."""
    return EnergyBudget(maintenance_power=0.02, availability_factor=1.0, converter_efficiency=0.3)


@pytest.fixture
def fast_sim_config():
    """Reduced Monte Carlo run for unit tests."""
    return SimConfig(trials=4000, seed=20140101, workers=1, chunk_size=500)


@pytest.fixture
def tmp_output_dir(tmp_path):
    """Fresh output directory that does not exist yet."""
    return tmp_path / "results" / "run"
