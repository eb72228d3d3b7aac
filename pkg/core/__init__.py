"""Numerical core: fields, geometry, Boris integrators and diagnostics."""

from core.errors import (
    BorisGCError,
    ConfigurationError,
    FieldDomainError,
    GridMismatch,
    NonFinite,
    SingularMatrix,
    ZeroField,
)
from core.fields import FIELD_MODELS, FieldModel, build_field
from core.integrators import IntegratorConfig, Method, ParticleState, Trajectory, integrate

__all__ = [
    "BorisGCError",
    "ConfigurationError",
    "FieldDomainError",
    "GridMismatch",
    "NonFinite",
    "SingularMatrix",
    "ZeroField",
    "FIELD_MODELS",
    "FieldModel",
    "build_field",
    "IntegratorConfig",
    "Method",
    "ParticleState",
    "Trajectory",
    "integrate",
]
