"""Boris time steppers, the reference solver and the guiding-centre solver."""

from core.integrators.boris import (
    boris_kick,
    boris_one_step,
    boris_rotate,
    boris_two_step,
    endpoint_velocity,
    filter_initial_velocity,
    startup_half_velocity,
    startup_position,
)
from core.integrators.engine import (
    ReferenceCache,
    gc_ode_solve,
    initial_magnetic_moment,
    integrate,
    populate_diagnostics,
    reference_solution,
    reference_substeps,
    regime_ratio,
)
from core.integrators.state import (
    Formulation,
    IntegratorConfig,
    Method,
    ParticleState,
    Trajectory,
    TrajectoryDiagnostics,
    time_grid,
)

__all__ = [
    "Formulation",
    "IntegratorConfig",
    "Method",
    "ParticleState",
    "ReferenceCache",
    "Trajectory",
    "TrajectoryDiagnostics",
    "boris_kick",
    "boris_one_step",
    "boris_rotate",
    "boris_two_step",
    "endpoint_velocity",
    "filter_initial_velocity",
    "gc_ode_solve",
    "initial_magnetic_moment",
    "integrate",
    "populate_diagnostics",
    "reference_solution",
    "reference_substeps",
    "regime_ratio",
    "startup_half_velocity",
    "startup_position",
    "time_grid",
]
