"""Application configuration using Pydantic settings."""

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Numerical and runtime defaults loaded from environment variables."""

    # Service
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "json"  # json | console
    OUTPUT_DIR: str = "./results"

    # Quadrature
    QUAD_REL_TOL: float = 1e-10
    QUAD_ABS_TOL: float = 1e-12
    QUAD_MAX_SUBDIVISIONS: int = 200

    # Inverse Laplace transform
    INVERSE_LAPLACE_METHOD: str = "fixed_talbot"  # fixed_talbot | euler
    INVERSE_LAPLACE_NODES: int = 32
    INVERSION_TOLERANCE: float = 1e-7  # allowed gap between successive node counts

    # Monte Carlo
    MC_TRIALS: int = 100_000
    MC_SEED: int = 20140101
    MC_TAIL_FRACTION: float = 1e-2  # truncated tail mean relative to lambda^(alpha/2) * P
    MC_WORKERS: int = 1
    MC_CHUNK_SIZE: int = 2000

    # Cross-validation
    AGREEMENT_FACTOR: float = 1.5  # agree iff |analytic - mc| <= factor * ci_halfwidth

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="SIET_",
        case_sensitive=True,
        extra="ignore",
    )


# Global settings instance
settings = Settings()
