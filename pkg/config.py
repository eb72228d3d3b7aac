"""Configuration management with environment variable support."""

import os
from dataclasses import dataclass, field


def _env_int(name: str, default: int) -> int:
    """Read a positive integer environment variable."""
    value = int(os.getenv(name, str(default)))
    if value < 1:
        raise ValueError(f"{name} must be at least 1, got {value}")
    return value


@dataclass(frozen=True)
class SolverDefaults:
    """Default solver settings."""

    gyro_substeps: int = field(default_factory=lambda: _env_int("BORIS_GC_GYRO_SUBSTEPS", 100))
    blowup_radius: float = 1e6
    regime_ratio_min: float = 0.0
    regime_ratio_max: float = 10.0
    richardson_tol: float = 1e-6
    exact_phase_reference: bool = field(
        default_factory=lambda: os.getenv("BORIS_GC_EXACT_PHASE", "true").lower() == "true"
    )


@dataclass(frozen=True)
class OutputDefaults:
    """Default output settings."""

    out_dir: str = field(default_factory=lambda: os.getenv("BORIS_GC_OUT", "runs"))
    digits: int = 17
    emit_plots: bool = field(
        default_factory=lambda: os.getenv("BORIS_GC_PLOTS", "false").lower() == "true"
    )


@dataclass(frozen=True)
class RuntimeConfig:
    """Application configuration."""

    workers: int = field(default_factory=lambda: _env_int("BORIS_GC_WORKERS", 1))
    log_level: str = field(default_factory=lambda: os.getenv("BORIS_GC_LOG_LEVEL", "INFO").upper())
    nondegeneracy_bound: float = 10.0

    solver: SolverDefaults = field(default_factory=SolverDefaults)
    output: OutputDefaults = field(default_factory=OutputDefaults)


# Global configuration instance
config = RuntimeConfig()
