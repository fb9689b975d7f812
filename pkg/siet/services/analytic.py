"""
Analytic probabilities for the PPP network: nearest-BS distance law,
interference Laplace transform, coverage, interference CDF and EEH.
"""

import math
from enum import Enum
from typing import Callable, Optional

import numpy as np
import structlog

from siet.core import numerics
from siet.core.exceptions import ValidationException
from siet.models.schemas import (
    EehQuery,
    EstimateSource,
    InterferenceTransform,
    InverseLaplaceSpec,
    InversionMethod,
    ProbabilityEstimate,
    QuadratureSpec,
    SystemParams,
)

logger = structlog.get_logger()

# pi^2 / 4, the erf-argument prefactor at alpha = 4.
LEVY_PREFACTOR = math.pi ** 2 / 4.0


class CdfMethod(str, Enum):
    """How the interference CDF at the origin is evaluated."""

    AUTO = "auto"  # closed form at alpha = 4, numerical inversion otherwise
    CLOSED = "closed"
    INVERSION = "inversion"


def closed_form_applicable(params: SystemParams) -> bool:
    """The erf / arctan closed forms hold for alpha = 4 without noise."""
    return params.alpha == 4 and params.interference_limited


def analytic_estimate(value: float) -> ProbabilityEstimate:
    """Wrap an analytic probability for side-by-side reports."""
    return ProbabilityEstimate(value=min(1.0, max(0.0, value)), source=EstimateSource.ANALYTIC)


# ============= Nearest base station =============

def nearest_distance_pdf(r, density: float):
    """f_r(r) = exp(-lambda*pi*r^2) * 2*pi*lambda*r."""
    r = np.asarray(r, dtype=float)
    pdf = np.exp(-density * np.pi * r ** 2) * 2.0 * np.pi * density * r
    return float(pdf) if pdf.ndim == 0 else pdf


def nearest_distance_cdf(r, density: float):
    """P[nearest BS within r] = 1 - exp(-lambda*pi*r^2)."""
    r = np.asarray(r, dtype=float)
    cdf = -np.expm1(-density * np.pi * r ** 2)
    return float(cdf) if cdf.ndim == 0 else cdf


# ============= Interference =============

def laplace_interference(t: InterferenceTransform, s: float) -> float:
    """
    Laplace transform of I(r) at real s > 0:
    exp[-pi*lambda*(sP)^(2/alpha) * G(r^2 (sP)^(-2/alpha))].
    """
    if not s > 0:
        raise ValidationException("s must be positive", details={"s": s})
    p = t.params
    scale = (s * p.power) ** (2.0 / p.alpha)
    if t.guard_radius == 0:
        kernel = numerics.g_kernel_zero(p.alpha)
    else:
        kernel = numerics.g_kernel(t.guard_radius ** 2 / scale, p.alpha)
    return math.exp(-math.pi * p.density * scale * kernel)


def origin_transform(params: SystemParams) -> Callable[[np.ndarray], np.ndarray]:
    """
    Laplace transform of I(0) valid for complex s:
    exp[-(2 pi^2 lambda / alpha) (sP)^(2/alpha) csc(2 pi / alpha)].
    """
    coefficient = math.pi * params.density * numerics.g_kernel_zero(params.alpha)
    exponent = 2.0 / params.alpha

    def transform(s: np.ndarray) -> np.ndarray:
        return np.exp(-coefficient * np.power(s * params.power, exponent))

    return transform


def interference_cdf_closed_alpha4(params: SystemParams, x: float) -> float:
    """Levy CDF of I(0) at alpha = 4: erfc(pi^2 lambda sqrt(P) / (4 sqrt(x)))."""
    if x <= 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    return float(numerics.erfc(LEVY_PREFACTOR * params.density_sqrt_power / math.sqrt(x)))


def _inversion_spec_for(params: SystemParams, spec: InverseLaplaceSpec) -> InverseLaplaceSpec:
    # The transform grows on the Talbot contour's far left when alpha < 4.
    if params.alpha < 4 and spec.method is InversionMethod.FIXED_TALBOT:
        return spec.model_copy(update={"method": InversionMethod.EULER})
    return spec


def interference_cdf_at_origin(
    params: SystemParams,
    x: float,
    method: CdfMethod = CdfMethod.AUTO,
    spec: Optional[InverseLaplaceSpec] = None
) -> float:
    """
    F_{I(0)}(x), the CDF of the aggregate received power at the origin.

    Args:
        params: Network parameters
        x: Evaluation point, watts
        method: AUTO uses the closed form at alpha = 4 and numerical
            inversion otherwise; CLOSED and INVERSION force one path
        spec: Inversion settings

    Raises:
        ValidationException: CLOSED requested for alpha != 4
        InversionException: numerical inversion failed with both methods
    """
    if x <= 0:
        return 0.0
    if math.isinf(x):
        return 1.0

    if method is CdfMethod.CLOSED and params.alpha != 4:
        raise ValidationException(
            "closed-form interference CDF requires alpha = 4",
            details={"alpha": params.alpha}
        )

    if method is CdfMethod.CLOSED or (method is CdfMethod.AUTO and params.alpha == 4):
        return interference_cdf_closed_alpha4(params, x)

    spec = _inversion_spec_for(params, spec or InverseLaplaceSpec())
    return numerics.inverse_laplace_cdf(origin_transform(params), x, spec)


# ============= Coverage =============

def coverage_probability(
    params: SystemParams,
    T: float,
    spec: Optional[QuadratureSpec] = None
) -> float:
    """
    Average coverage probability P[SINR > T] of the typical user,

        2*pi*lambda * int exp(-pi lambda r^2 - T r^alpha sigma^2/(rho P)) L_I(r)(T r^alpha / P) r dr.

    With u = pi*lambda*r^2 the interference factor becomes exp(-u * k(T))
    with k(T) = T^(2/alpha) G(T^(-2/alpha)), so lambda only enters through
    the noise term. The integral is then taken in v = (1 + k) u.

    Raises:
        ValidationException: T <= 0, or rho = 0 with noise present
        QuadratureException: the noise integral did not converge
    """
    if not T > 0:
        raise ValidationException("T must be positive", details={"T": T})
    if not params.interference_limited and params.rho == 0:
        raise ValidationException("rho must be positive when noise is present")

    a = params.alpha
    k = T ** (2.0 / a) * numerics.g_kernel(T ** (-2.0 / a), a, spec)
    damping = 1.0 + k

    if params.interference_limited:
        noise_coeff = 0.0
    else:
        noise_coeff = (
            T * params.noise / (params.rho * params.power)
            * (math.pi * params.density) ** (-a / 2.0)
        )

    def integrand(v: float) -> float:
        u = v / damping
        return math.exp(-v - noise_coeff * u ** (a / 2.0))

    value = numerics.integrate(integrand, 0.0, math.inf, spec).value / damping
    return min(1.0, max(0.0, value))


def coverage_probability_closed_alpha4(T: float) -> float:
    """P_c(T) = 1 / (1 + sqrt(T) (pi/2 - arctan(1/sqrt(T)))) for alpha = 4, sigma^2 = 0."""
    if not T > 0:
        raise ValidationException("T must be positive", details={"T": T})
    root = math.sqrt(T)
    return 1.0 / (1.0 + root * (math.pi / 2 - math.atan(1.0 / root)))


def coverage_probability_interference_limited(T: float, alpha: float) -> float:
    """P_c(T) = 1 / (1 + T^(2/alpha) G(T^(-2/alpha))) for sigma^2 = 0 and any alpha."""
    if not T > 0:
        raise ValidationException("T must be positive", details={"T": T})
    return 1.0 / (1.0 + T ** (2.0 / alpha) * numerics.g_kernel(T ** (-2.0 / alpha), alpha))


# ============= Efficient energy harvesting =============

def eeh_probability(
    q: EehQuery,
    method: CdfMethod = CdfMethod.INVERSION,
    spec: Optional[InverseLaplaceSpec] = None
) -> float:
    """
    Average EEH probability over the user state:

        1 - eps * F((Theta - sigma^2)/(1 - rho)) - (1 - eps) * F(Theta - sigma^2)

    with F the CDF of I(0), recovered by numerical Laplace inversion unless
    ``method`` says otherwise.
    """
    p = q.params
    excess = q.theta - p.noise

    if excess <= 0:
        logger.debug("analytic.eeh.theta_below_noise", theta=q.theta, noise=p.noise)
        return 1.0

    def cdf(x: float) -> float:
        return interference_cdf_at_origin(p, x, method=method, spec=spec)

    idle_cdf = cdf(excess)

    if p.epsilon == 0:
        active_cdf = 0.0
    elif p.rho == 1:
        # All power goes to the decoder; the active user never harvests enough.
        active_cdf = 1.0
    else:
        active_cdf = cdf(excess / (1.0 - p.rho))

    value = 1.0 - p.epsilon * active_cdf - (1.0 - p.epsilon) * idle_cdf
    return min(1.0, max(0.0, value))


def eeh_closed_form(density_sqrt_power, theta, rho: float, epsilon: float):
    """
    eps * erf((pi^2/4) lambda sqrt(P (1-rho) / Theta)) + (1-eps) * erf((pi^2/4) lambda sqrt(P / Theta)).

    Broadcasts over numpy arrays of lambda*sqrt(P) and Theta.
    """
    base = LEVY_PREFACTOR * np.asarray(density_sqrt_power, dtype=float) / np.sqrt(theta)
    value = (
        epsilon * numerics.erf(base * math.sqrt(1.0 - rho))
        + (1.0 - epsilon) * numerics.erf(base)
    )
    return float(value) if np.ndim(value) == 0 else value


def eeh_probability_closed_alpha4(q: EehQuery) -> float:
    """
    Closed-form EEH probability for alpha = 4, sigma^2 = 0.

    Raises:
        ValidationException: parameters outside the closed-form regime
    """
    if not closed_form_applicable(q.params):
        raise ValidationException(
            "closed-form EEH requires alpha = 4 and zero noise",
            details={"alpha": q.params.alpha, "noise": q.params.noise}
        )
    p = q.params
    return eeh_closed_form(p.density_sqrt_power, q.theta, p.rho, p.epsilon)
