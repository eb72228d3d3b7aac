"""Error sweeps over stepsize and eps, plateau levels and observed orders."""

import logging
import math
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

from core.diagnostics.report import ErrorReport, compare, magnetic_moment_drift
from core.errors import FieldDomainError, NonFinite
from core.fields.base import FieldModel
from core.integrators.engine import ReferenceCache, integrate, reference_solution
from core.integrators.state import IntegratorConfig, Method, ParticleState, Trajectory

logger = logging.getLogger(__name__)

DEFAULT_H_LIST = (0.5, 0.25, 0.125, 0.0625)
PLATEAU_POINTS = 3
PLATEAU_RATIO_WINDOW = (3.0, 5.0)
ORDER_WINDOW = (1.7, 2.3)
EPS_SPREAD_MAX = 0.5

# Metrics whose plateau levels are tabulated
PLATEAU_METRICS = ("err_x_final", "err_vpar_final", "err_vperp", "err_x", "err_gc")

_T = TypeVar("_T")
_R = TypeVar("_R")


def default_h_list(eps_min: float) -> list[float]:
    """Default stepsizes, keeping those with h² >= eps_min."""
    return [h for h in DEFAULT_H_LIST if h * h >= eps_min]


def fit_order(h: Sequence[float], err: Sequence[float]) -> float:
    """
    Least-squares slope of log(err) against log(h).

    Returns nan when fewer than two finite positive points remain.
    """
    hs = np.asarray(h, dtype=np.float64)
    es = np.asarray(err, dtype=np.float64)
    keep = np.isfinite(es) & (es > 0) & (hs > 0)
    if np.count_nonzero(keep) < 2:
        return math.nan
    slope, _ = np.polyfit(np.log(hs[keep]), np.log(es[keep]), 1)
    return float(slope)


def plateau(eps: Sequence[float], err: Sequence[float], points: int = PLATEAU_POINTS) -> float:
    """Median of err over the `points` smallest eps with a finite error."""
    pairs = sorted((e, v) for e, v in zip(eps, err) if math.isfinite(v))
    if not pairs:
        return math.nan
    return float(np.median([v for _, v in pairs[:points]]))


def mu_trend_ok(values: Sequence[float], max_inversions: int = 1) -> bool:
    """
    Check that values decrease along the sequence, up to a few inversions.

    values are ordered by decreasing eps.
    """
    inversions = sum(1 for a, b in zip(values, values[1:]) if not b < a)
    return inversions <= max_inversions


def _in_window(value: float, window: tuple[float, float]) -> bool:
    return window[0] <= value <= window[1]


@dataclass(frozen=True)
class ConvergenceRow:
    """One (h, eps) cell of a sweep."""

    h: float
    eps: float
    report: ErrorReport
    error: str | None = None

    @property
    def nonfinite(self) -> bool:
        """Check if the run left the finite range."""
        return self.report.nonfinite

    def as_dict(self) -> dict[str, object]:
        """Flatten to a CSV row."""
        return {"h": self.h, "eps": self.eps, **self.report.as_dict(), "error": self.error or ""}


@dataclass
class ConvergenceTable:
    """
    Result of a sweep: rows in input order plus derived summaries.

    plateaus maps metric -> {h: level}; ratios maps metric -> list of
    plateau(h) / plateau(h/2) for consecutive halvings; orders maps
    metric -> fitted exponent over h.
    """

    rows: list[ConvergenceRow]
    reference_mu_drift: dict[float, float] = field(default_factory=dict)
    plateaus: dict[str, dict[float, float]] = field(default_factory=dict)
    ratios: dict[str, list[float]] = field(default_factory=dict)
    orders: dict[str, float] = field(default_factory=dict)
    verdicts: dict[str, bool] = field(default_factory=dict)

    @property
    def h_values(self) -> list[float]:
        """Distinct stepsizes in input order."""
        return list(dict.fromkeys(row.h for row in self.rows))

    @property
    def eps_values(self) -> list[float]:
        """Distinct eps values in input order."""
        return list(dict.fromkeys(row.eps for row in self.rows))

    @property
    def nonfinite_rows(self) -> list[ConvergenceRow]:
        """Rows flagged as non-finite."""
        return [row for row in self.rows if row.nonfinite]

    def series(self, h: float, metric: str) -> tuple[list[float], list[float]]:
        """Return (eps, metric) for all rows with stepsize h."""
        rows = [row for row in self.rows if row.h == h]
        return [row.eps for row in rows], [getattr(row.report, metric) for row in rows]

    @property
    def passed(self) -> bool:
        """Check if every verdict holds."""
        return all(self.verdicts.values())

    def summarize(self) -> None:
        """Compute plateaus, ratios, orders and verdicts from the rows."""
        hs = sorted(self.h_values, reverse=True)
        for metric in PLATEAU_METRICS:
            self.plateaus[metric] = {h: plateau(*self.series(h, metric)) for h in hs}
            levels = self.plateaus[metric]
            self.ratios[metric] = [
                levels[a] / levels[b]
                for a, b in zip(hs, hs[1:])
                if math.isclose(a, 2.0 * b) and levels[b] > 0
            ]
            self.orders[metric] = fit_order(hs, [levels[h] for h in hs])

        self.verdicts = {}
        for metric in ("err_x_final", "err_vpar_final"):
            ratios = self.ratios[metric]
            if ratios:
                self.verdicts[f"plateau_ratio_{metric}"] = all(
                    _in_window(r, PLATEAU_RATIO_WINDOW) for r in ratios
                )
        if len(hs) >= 2:
            self.verdicts["order_err_vperp"] = _in_window(self.orders["err_vperp"], ORDER_WINDOW)
        self.verdicts["eps_independent"] = all(self._eps_spread(h) < EPS_SPREAD_MAX for h in hs)
        if len(self.reference_mu_drift) >= 3:
            drift = [self.reference_mu_drift[e] for e in sorted(self.reference_mu_drift, reverse=True)]
            self.verdicts["mu_trend"] = mu_trend_ok(drift)
        self.verdicts["all_finite"] = not self.nonfinite_rows

    def _eps_spread(self, h: float) -> float:
        eps, err = self.series(h, "err_x_final")
        pairs = sorted((e, v) for e, v in zip(eps, err) if h * h >= e and math.isfinite(v))
        values = [v for _, v in pairs[:PLATEAU_POINTS]]
        if len(values) < 2 or min(values) <= 0:
            return 0.0
        return max(values) / min(values) - 1.0


@dataclass(frozen=True)
class SweepSettings:
    """Solver settings shared by every cell of a sweep."""

    method: Method = Method.MODIFIED_BORIS
    gyro_substeps: int = 100
    richardson: bool = False
    exact_phase: bool = True
    blowup_radius: float = 1e6

    def config(self, method: Method, h: float, T: float, initial: ParticleState) -> IntegratorConfig:
        """Build the integrator config of one run."""
        return IntegratorConfig(
            method=method,
            h=h,
            T=T,
            initial=initial,
            gyro_substeps=self.gyro_substeps,
            richardson=self.richardson,
            exact_phase=self.exact_phase,
            blowup_radius=self.blowup_radius,
            regime_max=math.inf,
            track_nondegeneracy=False,
        )


def _reference_task(args: tuple[FieldModel, IntegratorConfig]) -> Trajectory:
    model, config = args
    return reference_solution(config, model)


def _cell_task(args: tuple[FieldModel, IntegratorConfig, Trajectory]) -> tuple[ErrorReport, str | None]:
    model, config, reference = args
    try:
        trajectory = integrate(config, model)
    except (NonFinite, FieldDomainError) as exc:
        logger.warning("h=%g eps=%g: %s", config.h, model.eps, exc)
        return ErrorReport.failed(), str(exc)
    return compare(trajectory, reference, model), None


def parallel_map(func: Callable[[_T], _R], tasks: Iterable[_T], workers: int) -> list[_R]:
    """Ordered map, in a process pool when workers > 1."""
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        return [func(task) for task in tasks]
    with Pool(min(workers, len(tasks))) as pool:
        return pool.map(func, tasks)


def convergence_table(
    model: FieldModel,
    h_list: Sequence[float],
    eps_list: Sequence[float],
    T: float,
    initial: ParticleState,
    settings: SweepSettings | None = None,
    workers: int = 1,
) -> ConvergenceTable:
    """
    Run the method against the reference for every (h, eps) pair.

    One reference per eps is computed on the smallest h and subsampled
    for the others. Cells run in a process pool when workers > 1 and are
    merged in input order (eps outer, h inner). Runs that leave the
    finite range are kept as flagged rows.

    Raises:
        ValueError: if either list is empty
    """
    if not h_list or not eps_list:
        raise ValueError("h_list and eps_list must be non-empty")
    settings = settings or SweepSettings()
    h_min = min(h_list)
    cache = ReferenceCache(h_min)

    models = [model.with_eps(eps) for eps in eps_list]
    ref_config = settings.config(Method.REFERENCE, h_min, T, initial)
    references = parallel_map(_reference_task, [(m, ref_config) for m in models], workers)
    for m, reference in zip(models, references):
        cache.store(m.eps, reference)
        if reference.metadata.get("richardson_passed") is False:
            logger.warning("eps=%g: reference failed its Richardson check", m.eps)

    tasks = []
    for m in models:
        for h in h_list:
            config = settings.config(settings.method, h, T, initial)
            tasks.append((m, config, cache.get(config, m)))
    logger.info("Running %d cells with %d worker(s)", len(tasks), workers)
    results = parallel_map(_cell_task, tasks, workers)

    rows = [
        ConvergenceRow(h=config.h, eps=m.eps, report=report, error=error)
        for (m, config, _), (report, error) in zip(tasks, results)
    ]
    table = ConvergenceTable(
        rows=rows,
        reference_mu_drift={
            m.eps: magnetic_moment_drift(ref, m)
            for m, ref in zip(models, references)
            if ref.diagnostics is not None
        },
    )
    table.summarize()
    return table
