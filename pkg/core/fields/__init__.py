"""Field models and the name registry used by configuration files."""

from typing import Any

from core.errors import ConfigurationError
from core.fields.base import FieldModel
from core.fields.cubic_potential import CubicPotentialField
from core.fields.custom import CustomField
from core.fields.tokamak import TokamakField
from core.fields.uniform import UniformField

FIELD_MODELS: dict[str, type[FieldModel]] = {
    "tokamak": TokamakField,
    "cubic-potential": CubicPotentialField,
    "uniform": UniformField,
}


def build_field(name: str, **params: Any) -> FieldModel:
    """
    Build a registered field model by name.

    Args:
        name: Registry name ("tokamak", "cubic-potential", "uniform")
        **params: Constructor parameters (eps, min_strength, ...)

    Raises:
        ConfigurationError: for unknown names or invalid parameters
    """
    try:
        cls = FIELD_MODELS[name]
    except KeyError:
        available = ", ".join(sorted(FIELD_MODELS))
        raise ConfigurationError(f"Unknown field '{name}'. Available fields: {available}") from None
    try:
        return cls(**params)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"Invalid parameters for field '{name}': {exc}") from exc


__all__ = [
    "FIELD_MODELS",
    "FieldModel",
    "CubicPotentialField",
    "CustomField",
    "TokamakField",
    "UniformField",
    "build_field",
]
