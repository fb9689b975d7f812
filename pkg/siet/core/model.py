"""Core network model: parameter validation, SINR and harvested power."""

from typing import Any, Mapping, Union

import numpy as np
import structlog
from pydantic import ValidationError

from siet.core.exceptions import ErrorCode, NumericalException, ValidationException
from siet.models.schemas import SystemParams, UserState

logger = structlog.get_logger()

ArrayLike = Union[float, np.ndarray]


def _first_error_message(exc: ValidationError) -> str:
    """Extract the message of the first pydantic error without its prefix."""
    err = exc.errors()[0]
    ctx_error = err.get("ctx", {}).get("error")
    if ctx_error is not None:
        return str(ctx_error)
    loc = ".".join(str(p) for p in err.get("loc", ()))
    return f"{loc}: {err['msg']}" if loc else err["msg"]


def validate(params: Union[SystemParams, Mapping[str, Any]]) -> SystemParams:
    """
    Validate a parameter set and return it unchanged when all invariants hold.

    Args:
        params: A SystemParams instance or a mapping of its fields

    Returns:
        The validated SystemParams

    Raises:
        ValidationException: naming the first violated invariant
    """
    data = params.model_dump() if isinstance(params, SystemParams) else dict(params)
    try:
        validated = SystemParams.model_validate(data)
    except ValidationError as e:
        message = _first_error_message(e)
        logger.warning("model.validate.failed", message=message)
        raise ValidationException(message, details={"params": data}) from e
    return params if isinstance(params, SystemParams) else validated


def instantaneous_sinr(
    fade: ArrayLike,
    distance: ArrayLike,
    interference: ArrayLike,
    params: SystemParams
) -> ArrayLike:
    """
    SINR = rho*h*r^-alpha / (sigma^2 + rho*I), elementwise over arrays.

    With sigma^2 = 0 rho cancels and is never multiplied in. A zero
    denominator with positive signal yields +inf.
    """
    fade = np.asarray(fade, dtype=float)
    distance = np.asarray(distance, dtype=float)
    interference = np.asarray(interference, dtype=float)

    if np.any(distance <= 0):
        raise NumericalException(
            ErrorCode.DOMAIN_ERROR,
            "distance must be positive",
            details={"min_distance": float(np.min(distance))}
        )
    if np.any(fade < 0) or np.any(interference < 0):
        raise NumericalException(
            ErrorCode.DOMAIN_ERROR,
            "fade and interference must be nonnegative"
        )

    signal = fade * np.power(distance, -params.alpha)
    with np.errstate(divide="ignore", invalid="ignore"):
        if params.interference_limited:
            sinr = signal / interference
        else:
            sinr = params.rho * signal / (params.noise + params.rho * interference)
    sinr = np.where(signal == 0, 0.0, sinr)
    return float(sinr) if sinr.ndim == 0 else sinr


def sample_user_state(rng: np.random.Generator, epsilon: float) -> UserState:
    """Draw the stationary user state: active with probability epsilon."""
    return UserState.ACTIVE if rng.random() < epsilon else UserState.IDLE


def harvested_power(
    interference: ArrayLike,
    params: SystemParams,
    state: UserState
) -> ArrayLike:
    """
    Power reaching the harvester under the adaptive split rho * 1(active).

    Idle users harvest everything, I + sigma^2. Active users divert rho of
    the received signal to the decoder and harvest (1 - rho) * I + sigma^2.
    """
    if state is UserState.IDLE:
        return interference + params.noise
    return (1.0 - params.rho) * interference + params.noise
