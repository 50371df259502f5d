from pathlib import Path
from typing import List, Optional

from dotenv import load_dotenv
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

# =============================
#      Environment loading
# =============================
load_dotenv()

# =============================
#          Base paths
# =============================
BASE_DIR = Path(__file__).resolve().parent.parent
DEFAULTS_FILE = Path(__file__).resolve().parent / "network" / "defaults.json"

SUPPORTED_BACKENDS = ("cbc", "mip-gurobi", "gurobi")


class AppSettings(BaseSettings):
    """Application settings with validation using Pydantic"""

    model_config = SettingsConfigDict(
        env_prefix="DADRES_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # =============================
    #        Solver Settings
    # =============================
    solver_backend: str = Field(default="cbc")
    solver_threads: int = Field(default=1, ge=1, le=64)
    solver_session_cap: int = Field(default=4, ge=1, le=256)
    time_limit_s: float = Field(default=600.0, gt=0)
    feasibility_tol: float = Field(default=1e-9, gt=0, le=1e-3)
    integrality_tol: float = Field(default=1e-7, gt=0, le=1e-3)
    optimality_tol: float = Field(default=1e-9, gt=0, le=1e-3)
    mip_gap: float = Field(default=1e-9, ge=0, le=1e-2)

    # =============================
    #      Decomposition Settings
    # =============================
    ccg_gap: float = Field(default=1e-6, gt=0)
    ccg_max_iterations: int = Field(default=200, ge=1)
    big_m_margin: float = Field(default=0.05, ge=0)
    big_m_max_escalations: int = Field(default=4, ge=0, le=12)
    oracle_cap: int = Field(default=20_000, ge=1)

    # =============================
    #        Worker Settings
    # =============================
    default_jobs: int = Field(default=1, ge=1, le=256)
    bench_sizes: str = Field(default="49,100,169,225")

    # =============================
    #        Logging Settings
    # =============================
    log_level: str = Field(default="INFO")
    log_json_format: bool = Field(default=False)
    log_file: Optional[str] = Field(default=None)
    log_component: str = Field(default="dadres")

    # =============================
    #        Monitoring Settings
    # =============================
    metrics_port: Optional[int] = Field(default=None, ge=1024, le=65535)

    @field_validator("solver_backend", mode="before")
    @classmethod
    def parse_solver_backend(cls, v):
        if isinstance(v, str):
            v = v.strip().lower()
        if v not in SUPPORTED_BACKENDS:
            raise ValueError(f"unknown solver backend {v!r}; expected one of {SUPPORTED_BACKENDS}")
        return v

    @property
    def bench_size_list(self) -> List[int]:
        return [int(x.strip()) for x in self.bench_sizes.split(",") if x.strip()]

    @field_validator("log_level", mode="before")
    @classmethod
    def parse_log_level(cls, v):
        return str(v).upper()


# Create settings instance
settings = AppSettings()


def get_settings() -> AppSettings:
    """Return the process-wide settings instance."""
    return settings


def reload_settings() -> AppSettings:
    """Re-read the environment; used by tests and after CLI overrides."""
    global settings
    settings = AppSettings()
    return settings
