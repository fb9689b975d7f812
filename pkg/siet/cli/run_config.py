"""
Run configuration: flat ``section.key=value`` files, command-line
overrides and the merged, validated result.

Precedence is flags > config file > defaults. Numerical knobs not named
here fall back to Settings.
"""

import re
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

import structlog
from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from siet.config import settings
from siet.core.exceptions import ErrorCode, ValidationException
from siet.core.model import validate
from siet.models.schemas import (
    EnergyBudget,
    FeasibilityConstraints,
    SimConfig,
    SystemParams,
    Thresholds,
)

logger = structlog.get_logger()

POWER_UNITS = {"w": 1.0, "mw": 1e-3, "uw": 1e-6}
_POWER_RE = re.compile(r"^\s*([-+0-9.eE]+)\s*(w|mw|uw)?\s*$", re.IGNORECASE)

DEFAULT_ZETA = 1.0
DEFAULT_ETA = 0.3


def parse_power(value: Any) -> Any:
    """'1mW' -> 0.001. Bare numbers are watts; non-strings pass through."""
    if not isinstance(value, str):
        return value
    match = _POWER_RE.match(value)
    if not match:
        raise ValueError(f"not a power value: {value!r}")
    number, unit = match.groups()
    return float(number) * POWER_UNITS[(unit or "w").lower()]


def parse_list(value: Any, item=float) -> Any:
    """'0.5, 0.8' -> [0.5, 0.8]; an empty string is an empty list."""
    if not isinstance(value, str):
        return value
    return [item(v) for v in (p.strip() for p in value.split(",")) if v]


def _none_if_blank(value: Any) -> Any:
    if isinstance(value, str) and not value.strip():
        return None
    return value


# ============= Sections =============

class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class RunSection(_Section):
    scenario: str = "default"
    out: str = Field(default_factory=lambda: settings.OUTPUT_DIR)


class SystemSection(_Section):
    density: float = Field(1e-2, alias="lambda")
    power: float = 1.0
    alpha: float = 4.0
    sigma2: float = 0.0
    rho: float = 0.1
    epsilon: float = 0.3

    power_units = field_validator("power", "sigma2", mode="before")(parse_power)


class ThresholdsSection(_Section):
    T: float = 1.0
    theta: float = 1e-3

    power_units = field_validator("theta", mode="before")(parse_power)


class EnergySection(_Section):
    pm: float = 0.02
    zeta: float = DEFAULT_ZETA
    # None falls back to DEFAULT_ETA for single-budget commands; figures sweep DEFAULT_ETA_LIST
    eta: Optional[float] = None

    power_units = field_validator("pm", mode="before")(parse_power)


class SimSection(_Section):
    trials: int = Field(default_factory=lambda: settings.MC_TRIALS)
    seed: int = Field(default_factory=lambda: settings.MC_SEED)
    window_radius: Optional[float] = None
    tail_tolerance: Optional[float] = None
    workers: int = Field(default_factory=lambda: settings.MC_WORKERS)
    chunk_size: int = Field(default_factory=lambda: settings.MC_CHUNK_SIZE)
    ci_target: Optional[float] = None

    blank_to_none = field_validator("window_radius", "ci_target", mode="before")(_none_if_blank)

    @field_validator("tail_tolerance", mode="before")
    @classmethod
    def parse_tail_tolerance(cls, v: Any) -> Any:
        return parse_power(_none_if_blank(v))


class ConstraintsSection(_Section):
    coverage_floor: float = 0.5
    power_max: float = 1.0
    lambda_max: float = 1e-2

    power_units = field_validator("power_max", mode="before")(parse_power)


class GridSection(_Section):
    T: Optional[List[float]] = None
    theta: Optional[List[float]] = None
    zeta: Optional[List[float]] = None
    rho: Optional[List[float]] = None
    eta: Optional[List[float]] = None
    lambda_max: Optional[List[float]] = None
    targets: Optional[List[float]] = None

    @field_validator("T", "zeta", "rho", "eta", "lambda_max", "targets", mode="before")
    @classmethod
    def parse_float_lists(cls, v: Any) -> Any:
        return parse_list(v)

    @field_validator("theta", mode="before")
    @classmethod
    def parse_power_lists(cls, v: Any) -> Any:
        return parse_list(v, item=parse_power)


class RunConfig(BaseModel):
    """Merged run configuration with typed accessors for every domain object."""

    model_config = ConfigDict(extra="forbid")

    run: RunSection = Field(default_factory=RunSection)
    system: SystemSection = Field(default_factory=SystemSection)
    thresholds: ThresholdsSection = Field(default_factory=ThresholdsSection)
    energy: EnergySection = Field(default_factory=EnergySection)
    sim: SimSection = Field(default_factory=SimSection)
    constraints: ConstraintsSection = Field(default_factory=ConstraintsSection)
    grid: GridSection = Field(default_factory=GridSection)

    def system_params(self) -> SystemParams:
        s = self.system
        return validate({
            "density": s.density,
            "power": s.power,
            "alpha": s.alpha,
            "noise": s.sigma2,
            "rho": s.rho,
            "epsilon": s.epsilon,
        })

    def thresholds_model(self) -> Thresholds:
        return _build(Thresholds, sinr_threshold=self.thresholds.T, eeh_threshold=self.thresholds.theta)

    @property
    def configured_eta(self) -> float:
        return DEFAULT_ETA if self.energy.eta is None else self.energy.eta

    def energy_budget(self, zeta: Optional[float] = None, eta: Optional[float] = None) -> EnergyBudget:
        return _build(
            EnergyBudget,
            maintenance_power=self.energy.pm,
            availability_factor=self.energy.zeta if zeta is None else zeta,
            converter_efficiency=self.configured_eta if eta is None else eta,
        )

    def sim_config(self) -> SimConfig:
        return _build(SimConfig, **self.sim.model_dump())

    def feasibility_constraints(self) -> FeasibilityConstraints:
        c = self.constraints
        return _build(
            FeasibilityConstraints,
            coverage_floor=c.coverage_floor,
            power_max=c.power_max,
            density_max=c.lambda_max,
        )

    @property
    def out_dir(self) -> Path:
        return Path(self.run.out)


def _error_text(exc: ValidationError) -> str:
    err = exc.errors()[0]
    loc = ".".join(str(p) for p in err.get("loc", ()))
    return f"{loc}: {err['msg']}" if loc else err["msg"]


def _build(model, **fields):
    try:
        return model(**fields)
    except ValidationError as e:
        raise ValidationException(_error_text(e), details=fields, code=ErrorCode.CONFIG_ERROR) from e


# ============= Loading and merging =============

def read_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """Read a key=value config file; comments and blank lines are ignored."""
    path = Path(path)
    if not path.is_file():
        raise ValidationException(
            "config file not found", details={"path": str(path)}, code=ErrorCode.CONFIG_ERROR
        )
    values = dotenv_values(path)
    logger.debug("config.file.loaded", path=str(path), keys=len(values))
    return {k: v for k, v in values.items() if v is not None}


def merge_config(
    file_values: Optional[Mapping[str, Any]] = None,
    overrides: Optional[Mapping[str, Any]] = None
) -> RunConfig:
    """
    Merge dotted-key values over the defaults, overrides last.

    Raises:
        ValidationException: malformed or unknown key, or a value that
            does not parse
    """
    merged: Dict[str, Any] = {}
    merged.update(file_values or {})
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})

    nested: Dict[str, Dict[str, Any]] = {}
    for key, value in merged.items():
        section, sep, name = key.partition(".")
        if not sep or not name:
            raise ValidationException(
                "config keys must look like section.key", details={"key": key}, code=ErrorCode.CONFIG_ERROR
            )
        nested.setdefault(section, {})[name] = value

    try:
        return RunConfig.model_validate(nested)
    except ValidationError as e:
        raise ValidationException(_error_text(e), details={"keys": sorted(merged)}, code=ErrorCode.CONFIG_ERROR) from e


def load_run_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None
) -> RunConfig:
    """Defaults, then the file at path (if any), then overrides."""
    file_values = read_config_file(path) if path else {}
    config = merge_config(file_values, overrides)
    logger.info("config.loaded", path=str(path) if path else None, scenario=config.run.scenario)
    return config


def _format(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(_format(v) for v in value)
    return str(value)


def dump_config(config: RunConfig) -> str:
    """Effective config as key=value text; unset optional keys are omitted."""
    lines = []
    for section in RunConfig.model_fields:
        data = getattr(config, section).model_dump(by_alias=True)
        lines.append(f"# {section}")
        for name, value in data.items():
            if value is None:
                continue
            lines.append(f"{section}.{name}={_format(value)}")
    return "\n".join(lines) + "\n"
