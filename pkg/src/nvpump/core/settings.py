"""Application settings."""

from pathlib import Path

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings.

    All settings can be configured via environment variables with NVPUMP_ prefix.
    Example: NVPUMP_LOG_LEVEL=DEBUG
    """

    model_config = SettingsConfigDict(env_prefix="NVPUMP_", validate_assignment=True)

    # Core settings
    readonly: bool = Field(
        default=False, description="Read-only mode (agent tools may not write files)"
    )
    output_dir: str = Field(default="./results", description="Default output directory")
    workers: int = Field(default=4, ge=1, description="Parallel workers for sweeps")

    # Numerical tolerances
    selectivity_threshold: float = Field(
        default=1e-3,
        gt=0.0,
        description="Off-target flip probability above which overlapping rotations are flagged",
    )
    trace_drift_tolerance: float = Field(
        default=1e-10, gt=0.0, description="Allowed trace drift per executed instruction"
    )
    min_line_separation_mhz: float = Field(
        default=0.02,
        gt=0.0,
        description="Two addressed transitions closer than this (MHz) cannot be told apart",
    )

    # Agent surface
    cache_ttl: float = Field(default=300.0, ge=0.0, description="Tool result cache TTL (s)")

    # Logging settings
    log_level: str = Field(
        default="INFO", description="Logging level (DEBUG, INFO, WARNING, ERROR)"
    )
    log_format: str = Field(
        default=(
            "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | "
            "<level>{level: <8}</level> | "
            "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - "
            "<level>{message}</level>"
        ),
        description="Log format for console output",
    )

    # Run log settings
    run_log_path: str | None = Field(
        default=None, description="Run log file path (disabled when unset)"
    )
    run_log_rotation: str = Field(default="10 MB", description="Run log rotation size")
    run_log_retention: str = Field(default="10 days", description="Run log retention period")
    run_log_serialize: bool = Field(default=True, description="Serialize run logs as JSON")

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Normalize and check the log level name."""
        level = v.upper()
        if level not in {"TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"Unknown log level: {v}")
        return level

    @field_validator("run_log_path")
    @classmethod
    def validate_run_log_path(cls, v: str | None) -> str | None:
        """Validate that the run log directory exists."""
        if v is None:
            return v

        path = Path(v).expanduser().resolve()
        if path.exists() and not path.is_file():
            raise ValueError(f"Run log path is not a file: {path}")
        if not path.parent.exists():
            raise ValueError(f"Run log directory does not exist: {path.parent}")

        return str(path)


settings = Settings()
