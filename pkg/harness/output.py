"""CSV and JSON output for trajectories, sweep tables and run metadata."""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Iterable, Mapping

import numpy as np

from core.errors import ConfigurationError
from core.integrators.state import Method, Trajectory, TrajectoryDiagnostics
from harness.schemas import RunMetadata

logger = logging.getLogger(__name__)

TRAJECTORY_COLUMNS = [
    "step",
    "t",
    "x1",
    "x2",
    "x3",
    "v1",
    "v2",
    "v3",
    "vpar",
    "vperp",
    "mu",
    "energy",
    "gc1",
    "gc2",
    "gc3",
    "R",
]

DIGITS = 17


def fmt(value: float, digits: int = DIGITS) -> str:
    """Format a float with the given number of significant digits."""
    return format(float(value), f".{digits}g")


def ensure_dir(path: str | Path) -> Path:
    """
    Create an output directory if needed.

    Raises:
        ConfigurationError: if the directory cannot be created
    """
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigurationError(f"Output directory {out} is not writable: {exc}") from exc
    return out


def major_radius(x: np.ndarray) -> np.ndarray:
    """R = sqrt(x1² + x2²) for each row."""
    return np.hypot(x[..., 0], x[..., 1])


def write_trajectory_csv(path: str | Path, trajectory: Trajectory, digits: int = DIGITS) -> Path:
    """
    Write a trajectory with its diagnostics, one row per output time.

    Raises:
        ValueError: if the trajectory carries no diagnostics
    """
    d = trajectory.diagnostics
    if d is None:
        raise ValueError("trajectory has no diagnostics")
    path = Path(path)
    radius = major_radius(trajectory.x)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(TRAJECTORY_COLUMNS)
        for n in range(len(trajectory)):
            values = (
                trajectory.t[n],
                *trajectory.x[n],
                *trajectory.v[n],
                d.vpar[n],
                d.vperp[n],
                d.mu[n],
                d.energy[n],
                *d.gc[n],
                radius[n],
            )
            writer.writerow([n, *(fmt(v, digits) for v in values)])
    logger.debug("Wrote %d rows to %s", len(trajectory), path)
    return path


def read_trajectory_csv(path: str | Path, method: Method = Method.REFERENCE) -> Trajectory:
    """
    Read a trajectory CSV back, diagnostics included.

    Raises:
        ConfigurationError: if the header does not match
    """
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != TRAJECTORY_COLUMNS:
            raise ConfigurationError(f"{path}: unexpected header {header}")
        data = np.array([[float(v) for v in row] for row in reader], dtype=np.float64)
    data = data.reshape(-1, len(TRAJECTORY_COLUMNS))
    t = data[:, 1]
    h = float(t[1] - t[0]) if len(t) > 1 else 0.0
    trajectory = Trajectory(method=method, h=h, t=t, x=data[:, 2:5], v=data[:, 5:8])
    trajectory.diagnostics = TrajectoryDiagnostics(
        mu=data[:, 10],
        energy=data[:, 11],
        vpar=data[:, 8],
        vperp=data[:, 9],
        gc=data[:, 12:15],
    )
    return trajectory


def write_table_csv(path: str | Path, rows: Iterable[Mapping[str, Any]], digits: int = DIGITS) -> Path:
    """Write dict rows to CSV; floats use the given significant digits."""
    rows = list(rows)
    path = Path(path)
    with open(path, "w", newline="") as f:
        if not rows:
            return path
        writer = csv.DictWriter(f, fieldnames=list(rows[0]))
        writer.writeheader()
        for row in rows:
            writer.writerow({k: fmt(v, digits) if isinstance(v, float) else v for k, v in row.items()})
    return path


def write_json(path: str | Path, data: Mapping[str, Any]) -> Path:
    """Write a JSON document with sorted keys."""
    path = Path(path)
    path.write_text(json.dumps(data, indent=2, sort_keys=True, default=str) + "\n")
    return path


def write_metadata(path: str | Path, metadata: RunMetadata) -> Path:
    """Write run metadata as JSON."""
    path = Path(path)
    path.write_text(metadata.model_dump_json(indent=2) + "\n")
    return path
