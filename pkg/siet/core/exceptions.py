"""Custom exceptions for the SIET feasibility toolkit."""

from enum import Enum
from typing import Dict, Any, Optional


class ErrorCode(str, Enum):
    """Error codes surfaced in logs and CLI reports."""

    # General errors
    INTERNAL_ERROR = "INTERNAL_ERROR"
    VALIDATION_ERROR = "VALIDATION_ERROR"
    CONFIG_ERROR = "CONFIG_ERROR"

    # Numerical errors
    QUADRATURE_NOT_CONVERGED = "QUADRATURE_NOT_CONVERGED"
    INVERSION_OSCILLATION = "INVERSION_OSCILLATION"
    ROOT_NOT_BRACKETED = "ROOT_NOT_BRACKETED"
    DIVERGENT_KERNEL = "DIVERGENT_KERNEL"
    DOMAIN_ERROR = "DOMAIN_ERROR"

    # Cross-validation
    ORACLE_DISAGREEMENT = "ORACLE_DISAGREEMENT"


class ExitCode(int, Enum):
    """Process exit codes for the command-line surface."""

    SUCCESS = 0
    UNEXPECTED = 1
    CONFIG = 2
    NUMERICAL = 3
    DISAGREEMENT = 4


class SietException(Exception):
    """Base exception for toolkit errors."""

    def __init__(
        self,
        code: ErrorCode,
        message: str,
        details: Optional[Dict[str, Any]] = None,
        exit_code: ExitCode = ExitCode.UNEXPECTED
    ):
        self.code = code
        self.message = message
        self.details = details or {}
        self.exit_code = exit_code
        super().__init__(message)


class ValidationException(SietException):
    """Exception for invariant violations and bad configuration."""

    def __init__(
        self,
        message: str,
        details: Optional[Dict[str, Any]] = None,
        code: ErrorCode = ErrorCode.VALIDATION_ERROR
    ):
        super().__init__(
            code=code,
            message=message,
            details=details,
            exit_code=ExitCode.CONFIG
        )


class NumericalException(SietException):
    """Exception for numerical failures in the kernels."""

    def __init__(self, code: ErrorCode, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(
            code=code,
            message=message,
            details=details,
            exit_code=ExitCode.NUMERICAL
        )


class QuadratureException(NumericalException):
    """Adaptive quadrature did not converge; carries the best estimate."""

    def __init__(self, estimate: float, error_bound: float, details: Optional[Dict[str, Any]] = None):
        details = details or {}
        details.update({"estimate": estimate, "error_bound": error_bound})
        self.estimate = estimate
        self.error_bound = error_bound
        super().__init__(
            code=ErrorCode.QUADRATURE_NOT_CONVERGED,
            message="Quadrature did not converge within the subdivision limit",
            details=details
        )


class InversionException(NumericalException):
    """Numerical Laplace inversion oscillates or leaves [0, 1]."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(
            code=ErrorCode.INVERSION_OSCILLATION,
            message=message,
            details=details
        )


class BracketException(NumericalException):
    """Root search bracket does not straddle the target."""

    def __init__(self, lo: float, hi: float, target: float):
        super().__init__(
            code=ErrorCode.ROOT_NOT_BRACKETED,
            message="Bracket does not straddle the target",
            details={"lo": lo, "hi": hi, "target": target}
        )


class OracleDisagreementException(SietException):
    """Analytic and Monte Carlo values disagree beyond the CI-scaled margin."""

    def __init__(self, quantities: list):
        super().__init__(
            code=ErrorCode.ORACLE_DISAGREEMENT,
            message=f"{len(quantities)} quantity(ies) disagree with the Monte Carlo oracle",
            details={"quantities": quantities},
            exit_code=ExitCode.DISAGREEMENT
        )
