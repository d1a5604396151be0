"""Application configuration management."""
from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings."""

    model_config = SettingsConfigDict(
        env_prefix="ACL_", env_file=".env", case_sensitive=False, extra="ignore"
    )

    # Logging
    log_level: str = "INFO"
    log_dir: Optional[str] = None

    # Riccati solver
    riccati_step: float = 1e-3
    riccati_max_iters: int = 10_000_000

    # Eigensolver / matrix checks
    jacobi_tol: float = 1e-14
    jacobi_max_sweeps: int = 64
    asymmetry_tol: float = 1e-9
    psd_tol: float = 1e-9

    # Graph
    disconnect_tol: float = 1e-8
    alpha_rtol: float = 1e-4

    # History stack
    rank_tol: float = 1e-6
    eps_add: float = 1e-3
    stack_capacity: int = 20
    t_record: float = 0.5

    # Simulation
    blowup_norm: float = 1e12


# Global settings instance
settings = Settings()
