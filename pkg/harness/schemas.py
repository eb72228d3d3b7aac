"""Pydantic schemas for experiment configuration files and run metadata."""

import json
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from config import config as runtime_config
from core.errors import ConfigurationError
from core.fields import FIELD_MODELS
from core.integrators.state import Method

MethodName = Literal["boris", "boris-filtered", "modified-boris", "reference", "gc-ode"]
Experiment = Literal["run", "banana", "converge", "check"]

Vector = tuple[float, float, float]


def _validation_message(exc: ValidationError) -> str:
    """Flatten a pydantic error into one line per problem."""
    return "; ".join(
        f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in exc.errors()
    )


class FieldSpec(BaseModel):
    """Field model name and constructor parameters."""

    model_config = ConfigDict(extra="forbid")

    name: str = Field(..., description="Registered field model")
    params: dict[str, Any] = Field(default_factory=dict)

    @field_validator("name")
    @classmethod
    def _known_field(cls, value: str) -> str:
        if value not in FIELD_MODELS:
            available = ", ".join(sorted(FIELD_MODELS))
            raise ValueError(f"Unknown field '{value}'. Available fields: {available}")
        return value


class InitialState(BaseModel):
    """Initial position and velocity."""

    model_config = ConfigDict(extra="forbid")

    x: Vector
    v: Vector


class ExperimentConfig(BaseModel):
    """
    One experiment as read from a JSON config file.

    Unset values are filled from the preset of the experiment at run
    time. CLI flags override file values, which override environment
    defaults.
    """

    model_config = ConfigDict(extra="forbid")

    experiment: Experiment = "run"
    field: FieldSpec | None = None
    methods: list[MethodName] | None = None
    h: float | None = Field(default=None, gt=0)
    h_list: list[float] | None = None
    T: float | None = Field(default=None, gt=0)
    eps: float | None = Field(default=None, gt=0)
    eps_list: list[float] | None = None
    initial: InitialState | None = None
    formulation: Literal["one-step", "two-step"] = "one-step"
    out_dir: str = Field(default_factory=lambda: runtime_config.output.out_dir)
    emit_plots: bool = Field(default_factory=lambda: runtime_config.output.emit_plots)
    seed: int = 0
    workers: int = Field(default_factory=lambda: runtime_config.workers, ge=1)
    full: bool = False
    richardson: bool = True
    gyro_substeps: int = Field(default_factory=lambda: runtime_config.solver.gyro_substeps, ge=1)
    nondegeneracy_bound: float = Field(default_factory=lambda: runtime_config.nondegeneracy_bound, gt=0)
    log_level: str = Field(default_factory=lambda: runtime_config.log_level)

    @field_validator("h_list", "eps_list")
    @classmethod
    def _positive_list(cls, value: list[float] | None) -> list[float] | None:
        if value is not None:
            if not value:
                raise ValueError("must not be empty")
            if any(not v > 0 for v in value):
                raise ValueError("all values must be positive")
        return value

    @field_validator("methods")
    @classmethod
    def _non_empty(cls, value: list[str] | None) -> list[str] | None:
        if value is not None and not value:
            raise ValueError("must not be empty")
        return value

    @classmethod
    def parse(cls, data: dict[str, Any]) -> "ExperimentConfig":
        """
        Validate a raw mapping.

        Raises:
            ConfigurationError: on any validation failure
        """
        try:
            return cls.model_validate(data)
        except ValidationError as exc:
            raise ConfigurationError(_validation_message(exc)) from exc

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        """
        Load a JSON config file.

        Raises:
            ConfigurationError: if the file is unreadable or invalid
        """
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"Cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigurationError(f"Config {path} must hold a JSON object")
        return cls.parse(data)

    def merged(self, overrides: dict[str, Any]) -> "ExperimentConfig":
        """Return a copy with the non-None overrides applied and revalidated."""
        data = self.model_dump()
        data.update({k: v for k, v in overrides.items() if v is not None})
        return self.parse(data)

    @property
    def method_enums(self) -> list[Method]:
        """Methods as enum members."""
        return [Method.from_name(m) for m in self.methods or []]


class RunMetadata(BaseModel):
    """
    Metadata written next to every trajectory CSV.

    analytic_jacobian is False when grad|B| is taken from central finite
    differences of B1.
    """

    method: str
    field: str
    formulation: str = "one-step"
    h: float
    T: float
    eps: float
    regime_ratio: float
    mu0: float
    num_steps: int
    wall_time: float
    max_nondegeneracy: float | None = None
    substeps: int | None = None
    richardson_change: float | None = None
    richardson_passed: bool | None = None
    analytic_jacobian: bool = True
    seed: int = 0
    csv: str
