"""Experiment presets: the tokamak banana orbit, the cubic-potential sweep and a uniform field."""

from dataclasses import dataclass, field

from core.errors import ConfigurationError

# eps = 2**-j for the convergence sweep
EPS_EXPONENTS = tuple(range(13, 19))
EPS_EXPONENTS_FULL = tuple(range(13, 23))

BANANA_METHODS = ("boris", "boris-filtered", "modified-boris")
BANANA_STEPSIZES = (0.2, 20.0)


@dataclass(frozen=True)
class Preset:
    """Field, initial data and time span of a named experiment."""

    name: str
    field: str
    x0: tuple[float, float, float]
    v0: tuple[float, float, float]
    T: float
    h: float
    eps: float
    field_params: dict[str, object] = field(default_factory=dict)
    methods: tuple[str, ...] = ("modified-boris",)


TOKAMAK = Preset(
    name="tokamak",
    field="tokamak",
    x0=(1.05, 0.0, 0.0),
    v0=(2.1e-3, 4.3e-4, 0.0),
    T=3.75e4,
    h=20.0,
    eps=1.0,
    methods=BANANA_METHODS,
)

CUBIC = Preset(
    name="cubic-potential",
    field="cubic-potential",
    x0=(0.0, 1.0, 0.1),
    v0=(0.09, 0.55, 0.3),
    T=1.0,
    h=0.125,
    eps=2.0**-13,
)

UNIFORM = Preset(
    name="uniform",
    field="uniform",
    x0=(0.0, 0.0, 0.0),
    v0=(0.0, 0.0, 1.0),
    T=1.0,
    h=0.1,
    eps=1e-3,
)

PRESETS: dict[str, Preset] = {p.name: p for p in (TOKAMAK, CUBIC, UNIFORM)}

# Preset used by each subcommand when the config names no field
EXPERIMENT_PRESETS = {
    "run": "tokamak",
    "banana": "tokamak",
    "converge": "cubic-potential",
    "check": "tokamak",
}


def get_preset(name: str) -> Preset:
    """
    Look up a preset by field name.

    Raises:
        ConfigurationError: if no preset exists
    """
    try:
        return PRESETS[name]
    except KeyError:
        available = ", ".join(sorted(PRESETS))
        raise ConfigurationError(f"No preset for '{name}'. Available presets: {available}") from None


def eps_sweep(full: bool = False) -> list[float]:
    """eps = 2**-j for j = 13..18, or 13..22 with full."""
    exponents = EPS_EXPONENTS_FULL if full else EPS_EXPONENTS
    return [2.0**-j for j in exponents]
