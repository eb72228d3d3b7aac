"""Particle state, integrator configuration and trajectory containers."""

import dataclasses
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator

import numpy as np
from numpy.typing import ArrayLike

from core.vecmath import Vec3, vec3

DEFAULT_GYRO_SUBSTEPS = 100
DEFAULT_BLOWUP_RADIUS = 1e6
DEFAULT_RICHARDSON_TOL = 1e-6


class Method(Enum):
    """Time-stepping methods."""

    BORIS = "boris"
    BORIS_FILTERED = "boris-filtered"
    MODIFIED_BORIS = "modified-boris"
    REFERENCE = "reference"
    GC_ODE = "gc-ode"

    def __str__(self) -> str:
        return self.value

    @property
    def filters_initial_velocity(self) -> bool:
        """Check if the perpendicular initial velocity is projected out."""
        return self in (Method.BORIS_FILTERED, Method.MODIFIED_BORIS)

    @property
    def uses_modified_force(self) -> bool:
        """Check if the force includes the -mu0 grad|B| term."""
        return self == Method.MODIFIED_BORIS

    @property
    def is_large_step(self) -> bool:
        """Check if the method is meant for steps beyond the gyroperiod."""
        return self in (Method.BORIS, Method.BORIS_FILTERED, Method.MODIFIED_BORIS)

    @classmethod
    def from_name(cls, name: "str | Method") -> "Method":
        """Look up a method by its CLI/config name."""
        if isinstance(name, Method):
            return name
        try:
            return cls(name)
        except ValueError:
            available = ", ".join(m.value for m in cls)
            raise ValueError(f"Unknown method '{name}'. Available methods: {available}") from None


class Formulation(Enum):
    """Algebraic form of the Boris recurrence."""

    ONE_STEP = "one-step"
    TWO_STEP = "two-step"


@dataclass(frozen=True)
class ParticleState:
    """Position, velocity and time of one particle."""

    x: Vec3
    v: Vec3
    t: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", vec3(self.x))
        object.__setattr__(self, "v", vec3(self.v))
        if not math.isfinite(self.t):
            raise ValueError("t must be finite")
        object.__setattr__(self, "t", float(self.t))

    @classmethod
    def from_values(cls, x: ArrayLike, v: ArrayLike, t: float = 0.0) -> "ParticleState":
        """Create a state from any array-like position and velocity."""
        return cls(np.asarray(x, dtype=np.float64), np.asarray(v, dtype=np.float64), t)

    def with_velocity(self, v: Vec3) -> "ParticleState":
        """Return a copy with the velocity replaced."""
        return ParticleState(self.x, v, self.t)


@dataclass(frozen=True)
class IntegratorConfig:
    """
    Settings for one trajectory run.

    For the Boris-family methods the ratio h²/eps is recorded and checked
    against [regime_min, regime_max]; violations only produce a warning.
    """

    method: Method
    h: float
    T: float
    initial: ParticleState
    mu0_override: float | None = None
    ref_substeps: int = 1
    gyro_substeps: int = DEFAULT_GYRO_SUBSTEPS
    formulation: Formulation = Formulation.ONE_STEP
    exact_phase: bool = True
    richardson: bool = False
    richardson_tol: float = DEFAULT_RICHARDSON_TOL
    blowup_radius: float = DEFAULT_BLOWUP_RADIUS
    regime_min: float = 0.0
    regime_max: float = 10.0
    track_nondegeneracy: bool = True
    gc_velocity_correction: bool = False

    def __post_init__(self) -> None:
        """Validate parameter combinations."""
        object.__setattr__(self, "method", Method.from_name(self.method))
        object.__setattr__(self, "formulation", Formulation(self.formulation))
        if not (self.h > 0 and math.isfinite(self.h)):
            raise ValueError("h must be positive")
        if not (self.T > 0 and math.isfinite(self.T)):
            raise ValueError("T must be positive")
        if self.h > self.T * (1.0 + 1e-12):
            raise ValueError("h must not exceed T")
        if self.ref_substeps < 1:
            raise ValueError("ref_substeps must be at least 1")
        if self.gyro_substeps < 1:
            raise ValueError("gyro_substeps must be at least 1")
        if self.mu0_override is not None and self.mu0_override < 0:
            raise ValueError("mu0_override must be non-negative")
        if self.blowup_radius <= 0:
            raise ValueError("blowup_radius must be positive")

    @property
    def num_steps(self) -> int:
        """Number of output steps, floor(T / h)."""
        return int(math.floor(self.T / self.h + 1e-9))

    def replace(self, **changes: object) -> "IntegratorConfig":
        """Return a copy with some fields changed."""
        return dataclasses.replace(self, **changes)  # type: ignore[arg-type]


@dataclass(frozen=True)
class TrajectoryDiagnostics:
    """Per-step diagnostic series, one entry per output time."""

    mu: np.ndarray
    energy: np.ndarray
    vpar: np.ndarray
    vperp: np.ndarray
    gc: np.ndarray
    nondegeneracy: np.ndarray | None = None

    @property
    def max_nondegeneracy(self) -> float | None:
        """Largest inverse norm of the nondegeneracy map along the run."""
        if self.nondegeneracy is None or len(self.nondegeneracy) == 0:
            return None
        return float(np.max(self.nondegeneracy))


@dataclass
class Trajectory:
    """
    Time series of particle states on the grid t_n = n h.

    For the Boris-family methods the stored velocity at interior times is
    the symmetric difference (x[n+1] - x[n-1]) / (2h); v[0] is the
    (possibly filtered) initial velocity.
    """

    method: Method
    h: float
    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    mu0: float = 0.0
    velocity_convention: str = "symmetric-difference"
    diagnostics: TrajectoryDiagnostics | None = None
    metadata: dict[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.x.shape != self.v.shape or self.x.shape != (len(self.t), 3):
            raise ValueError("t, x, v must describe the same number of states")

    def __len__(self) -> int:
        return len(self.t)

    @property
    def num_steps(self) -> int:
        """Number of steps (states minus one)."""
        return len(self.t) - 1

    @property
    def states(self) -> Iterator[ParticleState]:
        """Iterate over the stored states."""
        for i in range(len(self.t)):
            yield ParticleState(self.x[i], self.v[i], float(self.t[i]))

    @property
    def final(self) -> ParticleState:
        """Return the last state."""
        return ParticleState(self.x[-1], self.v[-1], float(self.t[-1]))

    def subsample(self, stride: int) -> "Trajectory":
        """Keep every stride-th state (diagnostics are dropped)."""
        if stride < 1:
            raise ValueError("stride must be at least 1")
        return Trajectory(
            method=self.method,
            h=self.h * stride,
            t=self.t[::stride].copy(),
            x=self.x[::stride].copy(),
            v=self.v[::stride].copy(),
            mu0=self.mu0,
            velocity_convention=self.velocity_convention,
            metadata=dict(self.metadata),
        )

    def truncate(self, num_steps: int) -> "Trajectory":
        """Keep the first num_steps + 1 states."""
        end = num_steps + 1
        return Trajectory(
            method=self.method,
            h=self.h,
            t=self.t[:end].copy(),
            x=self.x[:end].copy(),
            v=self.v[:end].copy(),
            mu0=self.mu0,
            velocity_convention=self.velocity_convention,
            metadata=dict(self.metadata),
        )


def time_grid(h: float, num_steps: int) -> np.ndarray:
    """Return t_n = n h for n = 0..num_steps."""
    return h * np.arange(num_steps + 1, dtype=np.float64)
