"""Pydantic value types shared by every analysis module."""

import math
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from siet.config import settings


# ============= Network Model =============

class SystemParams(BaseModel):
    """
    Network and receiver parameters of a homogeneous PPP small cell network.

    Field names are descriptive; the conventional symbols are accepted as
    aliases (``lambda``, ``sigma2``) so config files can use them directly.
    Invariants are checked in declaration order and the first violation is
    reported by name.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True, allow_inf_nan=False)

    density: float = Field(..., alias="lambda", description="BS density, BS per square meter")
    power: float = Field(..., description="BS transmit power P, watts")
    alpha: float = Field(..., description="Path-loss exponent")
    noise: float = Field(0.0, alias="sigma2", description="Receiver noise power, watts")
    rho: float = Field(..., description="Power-splitting factor towards the decoder")
    epsilon: float = Field(..., description="Probability the user is active")

    @model_validator(mode="after")
    def check_invariants(self) -> "SystemParams":
        """Reject the first violated invariant."""
        if not self.density > 0:
            raise ValueError("lambda must be positive")
        if not self.power > 0:
            raise ValueError("power must be positive")
        if not self.alpha > 2:
            raise ValueError("alpha must exceed 2")
        if not self.noise >= 0:
            raise ValueError("noise must be nonnegative")
        if not 0 <= self.rho <= 1:
            raise ValueError("rho out of [0,1]")
        if not 0 <= self.epsilon <= 1:
            raise ValueError("epsilon out of [0,1]")
        return self

    @property
    def fading_rate(self) -> float:
        """Rate of the exponential fading marks, always 1/P."""
        return 1.0 / self.power

    @property
    def interference_limited(self) -> bool:
        return self.noise == 0.0

    @property
    def density_sqrt_power(self) -> float:
        """The lambda*sqrt(P) combination that drives energy harvesting at alpha=4."""
        return self.density * math.sqrt(self.power)

    def with_overrides(self, **fields: Any) -> "SystemParams":
        """Return a validated copy with some fields replaced."""
        data = self.model_dump()
        data.update(fields)
        return SystemParams.model_validate(data)


class UserState(str, Enum):
    """Two-state user activity."""

    ACTIVE = "active"
    IDLE = "idle"


class Thresholds(BaseModel):
    """SINR threshold T (linear) and EEH threshold Theta (watts)."""

    model_config = ConfigDict(frozen=True)

    sinr_threshold: float = Field(..., gt=0, description="SINR threshold T, linear ratio")
    eeh_threshold: float = Field(..., gt=0, description="EEH threshold Theta, watts")


# ============= Numerical Kernels =============

class InversionMethod(str, Enum):
    """Numerical inverse Laplace transform algorithms."""

    FIXED_TALBOT = "fixed_talbot"
    EULER = "euler"

    @property
    def other(self) -> "InversionMethod":
        if self is InversionMethod.FIXED_TALBOT:
            return InversionMethod.EULER
        return InversionMethod.FIXED_TALBOT


class QuadratureSpec(BaseModel):
    """Tolerances for adaptive quadrature."""

    model_config = ConfigDict(frozen=True)

    rel_tol: float = Field(default_factory=lambda: settings.QUAD_REL_TOL, gt=0)
    abs_tol: float = Field(default_factory=lambda: settings.QUAD_ABS_TOL, ge=0)
    max_subdivisions: int = Field(default_factory=lambda: settings.QUAD_MAX_SUBDIVISIONS, ge=1)


class InverseLaplaceSpec(BaseModel):
    """Algorithm and node count for numerical Laplace inversion."""

    model_config = ConfigDict(frozen=True)

    method: InversionMethod = Field(
        default_factory=lambda: InversionMethod(settings.INVERSE_LAPLACE_METHOD)
    )
    node_count: int = Field(default_factory=lambda: settings.INVERSE_LAPLACE_NODES, ge=8)
    tolerance: float = Field(
        default_factory=lambda: settings.INVERSION_TOLERANCE,
        gt=0,
        description="Allowed gap between results at successive node counts"
    )


# ============= Analytic Queries =============

class InterferenceTransform(BaseModel):
    """Interference I(r) from base stations farther than the guard radius."""

    model_config = ConfigDict(frozen=True)

    params: SystemParams
    guard_radius: float = Field(0.0, ge=0, description="Guard radius r, meters")


class EehQuery(BaseModel):
    """Efficient-energy-harvesting probability query."""

    model_config = ConfigDict(frozen=True)

    params: SystemParams
    theta: float = Field(..., gt=0, description="EEH threshold Theta, watts")


class EstimateSource(str, Enum):
    MONTE_CARLO = "monte_carlo"
    ANALYTIC = "analytic"


class ProbabilityEstimate(BaseModel):
    """A probability with its provenance and 95% confidence half-width."""

    model_config = ConfigDict(frozen=True)

    value: float = Field(..., ge=0, le=1)
    ci_halfwidth: float = Field(0.0, ge=0)
    trials: int = Field(0, ge=0)
    source: EstimateSource
    empty_resamples: int = Field(0, ge=0, description="Empty windows that were redrawn")
    truncated_tail_mean: float = Field(
        0.0, ge=0, description="Expected interference lost outside the window, watts"
    )


# ============= Monte Carlo =============

class SimConfig(BaseModel):
    """Monte Carlo run configuration."""

    model_config = ConfigDict(frozen=True)

    trials: int = Field(default_factory=lambda: settings.MC_TRIALS, ge=1)
    seed: int = Field(default_factory=lambda: settings.MC_SEED, ge=0, lt=2**64)
    window_radius: Optional[float] = Field(None, gt=0, description="Meters; None means auto")
    tail_tolerance: Optional[float] = Field(
        None,
        gt=0,
        description="Bound on expected truncated interference, watts; None means relative default"
    )
    workers: int = Field(default_factory=lambda: settings.MC_WORKERS, ge=1)
    chunk_size: int = Field(default_factory=lambda: settings.MC_CHUNK_SIZE, ge=1)
    ci_target: Optional[float] = Field(
        None, gt=0, description="Requested CI half-width; a wider result is reported"
    )


# ============= Feasibility =============

class EnergyBudget(BaseModel):
    """Inputs of the harvesting threshold Theta = zeta * p_m / eta."""

    model_config = ConfigDict(frozen=True)

    maintenance_power: float = Field(..., gt=0, description="p_m, watts")
    availability_factor: float = Field(..., gt=0, description="zeta")
    converter_efficiency: float = Field(..., gt=0, le=1, description="eta")


class FeasibilityConstraints(BaseModel):
    """Constraints of the EEH maximization problem."""

    model_config = ConfigDict(frozen=True)

    coverage_floor: float = Field(..., ge=0, le=1, description="Minimum coverage probability")
    power_max: float = Field(..., gt=0, description="P_max, watts")
    density_max: float = Field(..., gt=0, description="lambda_max, BS per square meter")


class SweepTable(BaseModel):
    """Column-oriented results of a one-axis parameter sweep."""

    axis_name: str
    axis_values: List[float]
    series: Dict[str, List[float]]
    metadata: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def check_shape(self) -> "SweepTable":
        """Every series has one value per axis point; axis strictly increasing."""
        n = len(self.axis_values)
        for name, values in self.series.items():
            if len(values) != n:
                raise ValueError(f"series {name!r} has {len(values)} values for {n} axis points")
        if any(b <= a for a, b in zip(self.axis_values, self.axis_values[1:])):
            raise ValueError("axis must be strictly increasing")
        return self


class OptimalDeployment(BaseModel):
    """Optimum of the reduced EEH maximization: density, power and the EEH value there."""

    model_config = ConfigDict(frozen=True)

    density: float = Field(..., gt=0, description="BS per square meter")
    power: float = Field(..., gt=0, description="Watts")
    eeh_probability: float = Field(..., ge=0, le=1)


class P1Report(BaseModel):
    """Status of each constraint of the full maximization at one operating point."""

    model_config = ConfigDict(frozen=True)

    density: float
    power: float
    coverage: float = Field(..., ge=0, le=1)
    coverage_ok: bool
    power_ok: bool
    density_ok: bool
    eeh_probability: Optional[float] = Field(None, ge=0, le=1)

    @property
    def satisfied(self) -> bool:
        return self.coverage_ok and self.power_ok and self.density_ok

    @property
    def violations(self) -> List[str]:
        names = []
        if not self.coverage_ok:
            names.append("coverage")
        if not self.power_ok:
            names.append("power")
        if not self.density_ok:
            names.append("density")
        return names


class P1GridReport(BaseModel):
    """Grid evaluation of the full maximization with the best feasible point."""

    T: float
    theta: float
    points: List[P1Report]
    best: Optional[P1Report] = None


class LevelAssessment(BaseModel):
    """Feasibility of one energy-supply level for one converter efficiency."""

    level: str
    zeta: float
    eta: float
    theta: float
    density_max: float
    eeh_at_density_max: float
    target: float
    required_density: Optional[float] = None
    feasible: bool
