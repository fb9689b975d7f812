"""
Numerical kernels: error functions, the path-loss kernel G(y), adaptive
quadrature, monotone root search and numerical Laplace inversion.
"""

import math
from typing import Callable, NamedTuple, Optional, Tuple

import numpy as np
import structlog
from scipy import integrate as sp_integrate
from scipy import optimize
from scipy.special import binom, erf, erfc  # noqa: F401  erf, erfc re-exported
from tenacity import (
    RetryCallState,
    Retrying,
    retry_if_exception_type,
    stop_after_attempt,
)

from siet.core.exceptions import (
    BracketException,
    ErrorCode,
    InversionException,
    NumericalException,
    QuadratureException,
    ValidationException,
)
from siet.models.schemas import InverseLaplaceSpec, InversionMethod, QuadratureSpec

logger = structlog.get_logger()

# Beyond this point G(y) is summed analytically.
G_TAIL_SPLIT = 1e3
# Inversion results may leave [0, 1] by this much before it counts as oscillation.
CLAMP_SLACK = 1e-4
# Extra nodes used for the successive-node-count agreement check.
NODE_STEP = 8


class IntegrationResult(NamedTuple):
    value: float
    error: float


# ============= Quadrature =============

def integrate(
    f: Callable[[float], float],
    a: float,
    b: float = math.inf,
    spec: Optional[QuadratureSpec] = None
) -> IntegrationResult:
    """
    Adaptive Gauss-Kronrod quadrature of f over [a, b] or [a, inf).

    An infinite upper limit is mapped to [0, 1) with x = a + t/(1-t).

    Raises:
        QuadratureException: subdivision limit reached without meeting the
            tolerance; carries the best estimate and its error bound
    """
    spec = spec or QuadratureSpec()

    if math.isinf(b):
        def g(t: float) -> float:
            one_minus = 1.0 - t
            return f(a + t / one_minus) / (one_minus * one_minus)
        lo, hi = 0.0, 1.0
    else:
        g, lo, hi = f, a, b

    out = sp_integrate.quad(
        g, lo, hi,
        epsabs=spec.abs_tol,
        epsrel=spec.rel_tol,
        limit=spec.max_subdivisions,
        full_output=1,
    )
    value, error, info = out[0], out[1], out[2]

    # A fourth element carries QUADPACK's warning message.
    if len(out) > 3:
        target = max(spec.abs_tol, spec.rel_tol * abs(value))
        if info["last"] >= spec.max_subdivisions and error > target:
            logger.error(
                "numerics.integrate.not_converged",
                estimate=value,
                error_bound=error,
                subdivisions=spec.max_subdivisions
            )
            raise QuadratureException(value, error, details={"lower": a, "upper": b})
        logger.debug("numerics.integrate.warning", message=out[3], estimate=value, error_bound=error)

    return IntegrationResult(float(value), float(error))


# ============= Path-loss kernel =============

def g_kernel_zero(alpha: float) -> float:
    """G(0) = (2*pi/alpha) * csc(2*pi/alpha)."""
    if alpha <= 2:
        raise NumericalException(
            ErrorCode.DIVERGENT_KERNEL, "alpha must exceed 2", details={"alpha": alpha}
        )
    angle = 2.0 * math.pi / alpha
    return angle / math.sin(angle)


def _g_tail(y: float, alpha: float) -> float:
    """Integral of 1/(1+x^(alpha/2)) over [y, inf) for y > 1, as a power series in y^(-alpha/2)."""
    beta = alpha / 2.0
    total = 0.0
    for k in range(64):
        p = beta * (k + 1) - 1.0
        term = (-1) ** k * y ** (-p) / p
        total += term
        if abs(term) < 1e-17 * abs(total):
            break
    return total


def g_kernel(
    y: float,
    alpha: float,
    spec: Optional[QuadratureSpec] = None,
    use_closed_form: bool = True
) -> float:
    """
    G(y) = integral over [y, inf) of dx / (1 + x^(alpha/2)).

    alpha = 4 has the closed form pi/2 - arctan(y). Otherwise the integrand
    is integrated adaptively up to G_TAIL_SPLIT and the remainder is summed
    analytically.

    Raises:
        NumericalException: alpha <= 2 (the integral diverges)
    """
    if alpha <= 2:
        raise NumericalException(
            ErrorCode.DIVERGENT_KERNEL, "alpha must exceed 2", details={"alpha": alpha}
        )
    if y < 0:
        raise ValidationException("y must be nonnegative", details={"y": y})

    if alpha == 4 and use_closed_form:
        return math.pi / 2 - math.atan(y)

    if y >= G_TAIL_SPLIT:
        return _g_tail(y, alpha)

    half = alpha / 2.0
    body = integrate(lambda x: 1.0 / (1.0 + x ** half), y, G_TAIL_SPLIT, spec)
    return body.value + _g_tail(G_TAIL_SPLIT, alpha)


# ============= Root search =============

def find_root_monotone(
    f: Callable[[float], float],
    target: float,
    bracket: Tuple[float, float],
    tol: float,
    xtol: float = 1e-14
) -> float:
    """
    Solve f(x) = target for monotone f on a straddling bracket.

    Returns:
        x with |f(x) - target| <= tol

    Raises:
        BracketException: f(lo) and f(hi) do not straddle target
    """
    lo, hi = bracket
    f_lo = f(lo) - target
    f_hi = f(hi) - target

    if abs(f_lo) <= tol:
        return lo
    if abs(f_hi) <= tol:
        return hi
    if f_lo * f_hi > 0:
        raise BracketException(lo, hi, target)

    root = optimize.brentq(lambda x: f(x) - target, lo, hi, xtol=xtol, maxiter=500)

    residual = abs(f(root) - target)
    if residual > tol:
        raise NumericalException(
            ErrorCode.ROOT_NOT_BRACKETED,
            "Root search stalled above tolerance",
            details={"root": root, "residual": residual, "tol": tol}
        )
    return float(root)


# ============= Laplace inversion =============

def _talbot_nodes(m: int) -> Tuple[np.ndarray, np.ndarray]:
    """Fixed-Talbot nodes and weights in the unified (nodes/t, weights/t) form."""
    k = np.arange(1, m)
    theta = k * np.pi / m
    cot = 1.0 / np.tan(theta)
    nodes = np.empty(m, dtype=complex)
    weights = np.empty(m, dtype=complex)
    nodes[0] = 2.0 * m / 5.0
    nodes[1:] = 2.0 * k * np.pi / 5.0 * (cot + 1j)
    weights[0] = np.exp(nodes[0]) / 5.0
    weights[1:] = 2.0 / 5.0 * (1 + 1j * theta * (1 + cot ** 2) - 1j * cot) * np.exp(nodes[1:])
    return nodes, weights


def _euler_nodes(m: int) -> Tuple[np.ndarray, np.ndarray]:
    """Euler-summation nodes and weights (2m + 1 terms) in the unified form."""
    k = np.arange(2 * m + 1)
    xi = np.zeros(2 * m + 1)
    xi[0] = 0.5
    xi[1:m + 1] = 1.0
    xi[2 * m] = 2.0 ** (-m)
    for j in range(1, m):
        xi[2 * m - j] = xi[2 * m - j + 1] + 2.0 ** (-m) * binom(m, j)
    nodes = m * np.log(10.0) / 3.0 + 1j * np.pi * k
    weights = 10.0 ** (m / 3.0) * (-1.0) ** k * xi
    return nodes, weights.astype(complex)


def _invert_once(
    transform: Callable[[np.ndarray], np.ndarray],
    t: float,
    method: InversionMethod,
    node_count: int
) -> float:
    if method is InversionMethod.FIXED_TALBOT:
        nodes, weights = _talbot_nodes(node_count)
    else:
        nodes, weights = _euler_nodes(node_count // 2)
    with np.errstate(all="ignore"):
        values = transform(nodes / t)
        total = np.sum((weights * values).real) / t
    return float(total)


def inverse_laplace(
    transform: Callable[[np.ndarray], np.ndarray],
    t: float,
    method: InversionMethod,
    node_count: int,
    tolerance: float
) -> float:
    """
    Invert F(s) at t > 0 with the given method, checking that node_count
    and node_count + NODE_STEP agree to tolerance.

    ``transform`` must accept complex numpy arrays.

    Raises:
        InversionException: non-finite result or successive node counts disagree
    """
    first = _invert_once(transform, t, method, node_count)
    second = _invert_once(transform, t, method, node_count + NODE_STEP)

    if not (math.isfinite(first) and math.isfinite(second)):
        raise InversionException(
            "Inversion produced a non-finite value",
            details={"t": t, "method": method.value}
        )
    if abs(first - second) > tolerance:
        raise InversionException(
            "Successive node counts disagree",
            details={"t": t, "method": method.value, "first": first, "second": second}
        )
    return second


def inverse_laplace_cdf(
    transform: Callable[[np.ndarray], np.ndarray],
    x: float,
    spec: Optional[InverseLaplaceSpec] = None
) -> float:
    """
    CDF at x of the nonnegative variable whose Laplace transform is L(s),
    recovered as the inverse transform of L(s)/s.

    The configured method runs first; on oscillation the inversion is
    retried once with the other method.

    Returns:
        CDF value clamped to [0, 1]

    Raises:
        InversionException: both methods fail, or the value leaves [0, 1]
            by more than CLAMP_SLACK
    """
    spec = spec or InverseLaplaceSpec()
    if not x > 0:
        raise ValidationException("evaluation point must be positive", details={"x": x})

    def cdf_transform(s: np.ndarray) -> np.ndarray:
        return transform(s) / s

    def log_fallback(retry_state: RetryCallState) -> None:
        logger.warning(
            "numerics.inversion.fallback",
            x=x,
            failed_method=spec.method.value,
            next_method=spec.method.other.value,
            reason=str(retry_state.outcome.exception())
        )

    for attempt in Retrying(
        stop=stop_after_attempt(2),
        retry=retry_if_exception_type(InversionException),
        before_sleep=log_fallback,
        reraise=True,
    ):
        with attempt:
            method = spec.method if attempt.retry_state.attempt_number == 1 else spec.method.other
            value = inverse_laplace(cdf_transform, x, method, spec.node_count, spec.tolerance)
            if value < -CLAMP_SLACK or value > 1 + CLAMP_SLACK:
                raise InversionException(
                    "Inverted CDF outside [0, 1]",
                    details={"x": x, "value": value, "method": method.value}
                )

    return min(1.0, max(0.0, value))
