"""
Run settings and logging setup.

All numeric tolerances used across the library live here so a single
environment override (``SQUASH_*`` variables or a ``.env`` file) changes them
consistently for every module.
"""

import logging
import os
from functools import lru_cache
from pathlib import Path
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class ConfigurationError(Exception):
    """Raised when settings or a run configuration are inconsistent."""


class Settings(BaseSettings):
    """
    Library settings with environment variable support.

    Every field can be overridden with ``SQUASH_<FIELD_NAME>``.
    """

    model_config = SettingsConfigDict(
        env_prefix="SQUASH_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Predicates and degeneracy
    degeneracy_tol: float = Field(
        default=1e-10,
        gt=0.0,
        le=1e-3,
        description="Absolute tolerance for 'non-degenerate' on unit-scale geometry",
    )
    vertical_band: float = Field(
        default=1e-9,
        ge=0.0,
        le=1e-3,
        description="Half-width of the N.n band that triggers a near-vertical warning",
    )
    vertical_angle_tol: float = Field(
        default=1e-9,
        ge=0.0,
        le=1e-2,
        description="A simplex is vertical when its max angle reaches pi/2 minus this",
    )
    genericity_tol: float = Field(
        default=1e-9,
        ge=0.0,
        le=1e-3,
        description="Minimum |alt| at Voronoi vertices before genericity is declared violated",
    )
    bisection_tol: float = Field(
        default=1e-10,
        gt=0.0,
        le=1e-3,
        description="Parameter tolerance when locating crossings on Voronoi edges",
    )

    # Manifold projection
    newton_tol: float = Field(
        default=1e-12,
        gt=0.0,
        le=1e-6,
        description="Residual at which implicit-surface projection is converged",
    )
    newton_max_steps: int = Field(
        default=100,
        ge=5,
        le=10_000,
        description="Damped Newton step budget for implicit-surface projection",
    )

    # Witness grids and sampling
    witness_ratio: float = Field(
        default=0.1,
        gt=0.0,
        le=1.0,
        description="Witness grid spacing as a fraction of epsilon",
    )
    max_witnesses: int = Field(
        default=250_000,
        ge=100,
        description="Upper bound on witness grid size (spacing grows to respect it)",
    )
    exclusion_ratio: float = Field(
        default=0.5,
        gt=0.0,
        le=1.0,
        description="Dart-throwing exclusion radius as a fraction of epsilon",
    )
    dart_failure_budget: int = Field(
        default=2_000,
        ge=10,
        description="Consecutive rejected darts before dart throwing hands over to gap filling",
    )
    max_sample_points: int = Field(
        default=200_000,
        ge=10,
        description="Hard ceiling on generated cloud size before InfeasibleSpec is raised",
    )

    # Angle evaluation over simplices
    angle_grid_resolution: int = Field(
        default=3,
        ge=1,
        le=12,
        description="Barycentric lattice subdivisions used when maximising angles over a simplex",
    )
    angle_refine_steps: int = Field(
        default=24,
        ge=0,
        le=200,
        description="Golden-section iterations per refinement segment",
    )

    # Restricted Delaunay
    ray_clip_factor: float = Field(
        default=3.0,
        gt=0.0,
        description="Unbounded Voronoi rays are clipped at this multiple of R past the bounding box",
    )
    crossing_samples: int = Field(
        default=16,
        ge=1,
        le=1024,
        description="Sub-intervals scanned for sign changes along each Voronoi edge",
    )

    # Squash verification
    spot_check_every: int = Field(
        default=0,
        ge=0,
        description="Re-verify hypotheses every k collapses (0 disables)",
    )
    use_lfs: bool = Field(
        default=False,
        description="Evaluate angle bounds with per-vertex local feature size instead of R",
    )

    # Output and logging
    output_dir: str = Field(
        default="./outputs",
        description="Directory for meshes, traces and reports",
    )
    log_level: str = Field(
        default="INFO",
        description="Logging level (DEBUG, INFO, WARNING, ERROR)",
    )
    log_file: Optional[str] = Field(
        default=None,
        description="Log file path (None for stderr only)",
    )

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, v: str) -> str:
        level = v.upper()
        if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"unknown log level {v!r}")
        return level

    @property
    def output_path(self) -> Path:
        """Output directory as a Path, created on first use."""
        path = Path(self.output_dir)
        path.mkdir(parents=True, exist_ok=True)
        return path


def setup_logging(
    level: Optional[str] = None,
    log_file: Optional[str] = None,
) -> logging.Logger:
    """
    Configure application logging.

    Args:
        level: Logging level (DEBUG, INFO, WARNING, ERROR)
        log_file: Optional file path for logging output

    Returns:
        Configured root logger
    """
    settings = get_settings()
    level = level or settings.log_level
    log_file = log_file or settings.log_file

    log_format = "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s"
    date_format = "%Y-%m-%d %H:%M:%S"

    handlers: list[logging.Handler] = [logging.StreamHandler()]
    if log_file:
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=getattr(logging, level.upper()),
        format=log_format,
        datefmt=date_format,
        handlers=handlers,
        force=True,
    )

    return logging.getLogger()


@lru_cache()
def get_settings() -> Settings:
    """
    Get cached settings.

    Loads a ``.env`` file from the working directory or the project root before
    reading the environment.
    """
    from dotenv import load_dotenv

    for env_path in (Path.cwd() / ".env", Path(__file__).parent.parent.parent / ".env"):
        if env_path.exists():
            load_dotenv(env_path)
            break

    return Settings()


def clear_settings_cache() -> None:
    """Clear the settings cache to reload configuration."""
    get_settings.cache_clear()


def apply_overrides(overrides: dict[str, object]) -> Settings:
    """
    Override settings for the rest of the process.

    Raises:
        ConfigurationError: On an unknown field or an invalid value.
    """
    unknown = sorted(set(overrides) - set(Settings.model_fields))
    if unknown:
        raise ConfigurationError(f"unknown settings: {', '.join(unknown)}")
    for key, value in overrides.items():
        os.environ[f"SQUASH_{key.upper()}"] = str(value)
    clear_settings_cache()
    try:
        return get_settings()
    except ValueError as e:
        raise ConfigurationError(f"invalid settings override: {e}")
