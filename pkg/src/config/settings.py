"""Application settings."""
from functools import lru_cache

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Simulator defaults, overridable through STIRAP_* environment variables."""

    model_config = SettingsConfigDict(env_prefix="STIRAP_", env_file=".env", extra="ignore")

    # Logging
    log_level: str = "INFO"

    # Couplings (ħ = 1, energies in units of J)
    default_j: float = 1.0
    default_m: float = 10.0

    # Tolerances
    zero_tol_factor: float = 1e-6      # zero_tol = factor · max(J, M)
    kernel_tol_factor: float = 1e-10   # dark-state residual bound, times max(J, M)
    unitary_tol: float = 1e-12
    hermitian_tol: float = 1e-12

    # Dynamics
    step_safety: float = 0.1           # dt · ‖H‖ bound
    max_steps: int = 10_000_000
    trace_samples: int = 200

    # Scans and dense limits
    s_grid_points: int = 101
    max_spin_count: int = 14
    max_dense_dim: int = 16384
    max_workers: int = 1

    # Shipped example circuits for `verify`
    corpus_dir: str = "circuits"


@lru_cache()
def get_settings() -> Settings:
    """Get application settings."""
    return Settings()
