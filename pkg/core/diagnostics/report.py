"""Error metrics of a trajectory against an oracle trajectory."""

import math
from dataclasses import asdict, dataclass

import numpy as np

from core.errors import GridMismatch
from core.fields.base import FieldModel
from core.integrators.engine import populate_diagnostics
from core.integrators.state import Trajectory, TrajectoryDiagnostics
from core.vecmath import norm

# Relative tolerance on the time grids of compared trajectories
GRID_TOL = 1e-10


@dataclass(frozen=True)
class ErrorReport:
    """
    Errors of one trajectory against a reference.

    The err_* values are maxima over the output grid; the *_final values
    are taken at the last output time. err_vperp, mu_drift and
    energy_drift describe the compared trajectory alone.
    """

    err_x: float
    err_vpar: float
    err_vperp: float
    err_gc: float
    mu_drift: float
    energy_drift: float
    err_x_final: float
    err_vpar_final: float
    err_vperp_final: float
    nonfinite: bool = False

    @classmethod
    def failed(cls) -> "ErrorReport":
        """Report for a run that left the finite range."""
        return cls(*(math.inf,) * 9, nonfinite=True)

    def as_dict(self) -> dict[str, float | bool]:
        """Return the fields as a plain dict."""
        return asdict(self)


def _diagnostics(trajectory: Trajectory, model: FieldModel) -> TrajectoryDiagnostics:
    if trajectory.diagnostics is None:
        return populate_diagnostics(trajectory, model)
    return trajectory.diagnostics


def check_grids(traj: Trajectory, ref: Trajectory) -> None:
    """
    Raise GridMismatch unless both trajectories share the output times.

    Raises:
        GridMismatch: on different lengths or times differing by more than
            1e-10 relative
    """
    if len(traj) != len(ref):
        raise GridMismatch(f"Grids have {len(traj)} and {len(ref)} points")
    scale = max(float(np.max(np.abs(ref.t))), 1.0)
    if float(np.max(np.abs(traj.t - ref.t))) > GRID_TOL * scale:
        raise GridMismatch(f"Time grids differ (h = {traj.h} vs {ref.h})")


def _drift(series: np.ndarray, baseline: float | None = None) -> float:
    start = series[0] if baseline is None else baseline
    return float(np.max(np.abs(series - start)))


def magnetic_moment_drift(trajectory: Trajectory, model: FieldModel) -> float:
    """
    Return max |mu(t_n) - mu0| along a trajectory.

    For modified-boris mu0 is the frozen moment of the unfiltered initial
    velocity, which the filtered start does not carry; every other method
    is measured against mu(t_0).
    """
    d = _diagnostics(trajectory, model)
    if trajectory.method.uses_modified_force:
        return _drift(d.mu, trajectory.mu0)
    return _drift(d.mu)


def compare(traj: Trajectory, ref: Trajectory, model: FieldModel) -> ErrorReport:
    """
    Compare a trajectory with a reference on the same output grid.

    Parallel velocities use each trajectory's own positions for the
    projection. mu_drift is magnetic_moment_drift(traj); energy_drift is
    max |E(t_n) - E(t_0)| along traj.

    Raises:
        GridMismatch: if the time grids differ
    """
    check_grids(traj, ref)
    d = _diagnostics(traj, model)
    d_ref = _diagnostics(ref, model)

    dx = norm(traj.x - ref.x)
    dvpar = np.abs(d.vpar - d_ref.vpar)
    dgc = norm(d.gc - d_ref.gc)
    return ErrorReport(
        err_x=float(np.max(dx)),
        err_vpar=float(np.max(dvpar)),
        err_vperp=float(np.max(d.vperp)),
        err_gc=float(np.max(dgc)),
        mu_drift=magnetic_moment_drift(traj, model),
        energy_drift=_drift(d.energy),
        err_x_final=float(dx[-1]),
        err_vpar_final=float(dvpar[-1]),
        err_vperp_final=float(d.vperp[-1]),
    )
