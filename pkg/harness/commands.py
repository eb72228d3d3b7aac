"""Subcommand implementations: run, banana, converge and check."""

import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from config import config as runtime_config
from core.diagnostics import (
    ConvergenceTable,
    SweepSettings,
    convergence_table,
    default_h_list,
    magnetic_moment_drift,
    parallel_map,
)
from core.errors import FieldDomainError, NonFinite
from core.fields import FieldModel, build_field
from core.geometry import hausdorff_distance, northrop_residual
from core.integrators import (
    Formulation,
    IntegratorConfig,
    Method,
    ParticleState,
    Trajectory,
    integrate,
    regime_ratio,
)
from harness.output import (
    ensure_dir,
    major_radius,
    write_json,
    write_metadata,
    write_table_csv,
    write_trajectory_csv,
)
from harness.plots import LinePlot
from harness.presets import (
    BANANA_METHODS,
    BANANA_STEPSIZES,
    EXPERIMENT_PRESETS,
    eps_sweep,
    get_preset,
)
from harness.schemas import ExperimentConfig, RunMetadata

logger = logging.getLogger(__name__)

# Separation factor between the modified method and the others at large h
BANANA_SEPARATION = 5.0
# Allowed ratio of standard to modified Boris at small h
BANANA_SMALL_STEP_RATIO = 2.0
NORTHROP_SAMPLES = 10


@dataclass(frozen=True)
class ResolvedExperiment:
    """An experiment config with every unset value taken from its preset."""

    field_name: str
    field_params: dict[str, Any]
    eps: float
    h: float
    T: float
    initial: ParticleState
    methods: list[Method]

    def build_model(self) -> FieldModel:
        """Instantiate the field model."""
        return build_field(self.field_name, eps=self.eps, **self.field_params)


def resolve(cfg: ExperimentConfig) -> ResolvedExperiment:
    """
    Fill unset config values from the preset of the field or experiment.

    Raises:
        ConfigurationError: if the field has no preset or bad parameters
    """
    name = cfg.field.name if cfg.field else EXPERIMENT_PRESETS[cfg.experiment]
    preset = get_preset(name)
    params = dict(preset.field_params)
    if cfg.field:
        params.update(cfg.field.params)
    file_eps = params.pop("eps", None)
    eps = cfg.eps or file_eps or preset.eps
    if cfg.initial:
        initial = ParticleState.from_values(cfg.initial.x, cfg.initial.v)
    else:
        initial = ParticleState.from_values(preset.x0, preset.v0)
    methods = cfg.method_enums or [Method.MODIFIED_BORIS]
    return ResolvedExperiment(
        field_name=name,
        field_params=params,
        eps=float(eps),
        h=cfg.h or preset.h,
        T=cfg.T or preset.T,
        initial=initial,
        methods=methods,
    )


def integrator_config(
    cfg: ExperimentConfig,
    run: ResolvedExperiment,
    method: Method,
    h: float,
    track_nondegeneracy: bool = True,
) -> IntegratorConfig:
    """Build the integrator settings of one run."""
    solver = runtime_config.solver
    return IntegratorConfig(
        method=method,
        h=h,
        T=run.T,
        initial=run.initial,
        gyro_substeps=cfg.gyro_substeps,
        formulation=Formulation(cfg.formulation),
        exact_phase=solver.exact_phase_reference,
        richardson=cfg.richardson,
        richardson_tol=solver.richardson_tol,
        blowup_radius=solver.blowup_radius,
        regime_min=solver.regime_ratio_min,
        regime_max=solver.regime_ratio_max,
        track_nondegeneracy=track_nondegeneracy and method.is_large_step,
    )


def run_metadata(
    trajectory: Trajectory,
    model: FieldModel,
    run: ResolvedExperiment,
    csv_name: str,
    seed: int,
) -> RunMetadata:
    """Collect the metadata document of one trajectory."""
    meta = trajectory.metadata
    return RunMetadata(
        method=str(trajectory.method),
        field=run.field_name,
        formulation=str(meta.get("formulation", "one-step")),
        h=trajectory.h,
        T=run.T,
        eps=model.eps,
        regime_ratio=regime_ratio(trajectory.h, model.eps),
        mu0=trajectory.mu0,
        num_steps=trajectory.num_steps,
        wall_time=float(meta.get("wall_time", 0.0)),  # type: ignore[arg-type]
        max_nondegeneracy=meta.get("max_nondegeneracy"),  # type: ignore[arg-type]
        substeps=meta.get("substeps"),  # type: ignore[arg-type]
        richardson_change=meta.get("richardson_change"),  # type: ignore[arg-type]
        richardson_passed=meta.get("richardson_passed"),  # type: ignore[arg-type]
        analytic_jacobian=model.has_analytic_jacobian,
        seed=seed,
        csv=csv_name,
    )


def _stem(field_name: str, method: Method, h: float) -> str:
    return f"{field_name}_{method}_h{h:g}"


def _projection(field_name: str, points: np.ndarray) -> np.ndarray:
    """(R, x3) for the tokamak, (x1, x3) otherwise."""
    if field_name == "tokamak":
        return np.column_stack((major_radius(points), points[:, 2]))
    return points[:, [0, 2]]


def _save_trajectory(
    out: Path,
    trajectory: Trajectory,
    model: FieldModel,
    run: ResolvedExperiment,
    seed: int,
) -> list[Path]:
    stem = _stem(run.field_name, trajectory.method, trajectory.h)
    csv_path = write_trajectory_csv(out / f"{stem}.csv", trajectory, runtime_config.output.digits)
    meta_path = write_metadata(
        out / f"{stem}.json",
        run_metadata(trajectory, model, run, csv_path.name, seed),
    )
    return [csv_path, meta_path]


def cmd_run(cfg: ExperimentConfig) -> list[Path]:
    """
    Integrate each configured method and write CSV plus metadata.

    Raises:
        NonFinite: if a run leaves the finite range
        ConfigurationError: for invalid field settings or output paths
    """
    run = resolve(cfg)
    model = run.build_model()
    out = ensure_dir(cfg.out_dir)
    written: list[Path] = []
    for method in run.methods:
        trajectory = integrate(integrator_config(cfg, run, method, run.h), model)
        written += _save_trajectory(out, trajectory, model, run, cfg.seed)
        if cfg.emit_plots:
            xy = _projection(run.field_name, trajectory.x)
            labels = ("R", "x3") if run.field_name == "tokamak" else ("x1", "x3")
            plot = LinePlot(title=f"{method}, h = {run.h:g}", xlabel=labels[0], ylabel=labels[1])
            plot.add_series(str(method), xy[:, 0], xy[:, 1])
            written.append(plot.save(out / f"{_stem(run.field_name, method, run.h)}.svg"))
    logger.info("run: wrote %d files to %s", len(written), out)
    return written


@dataclass
class BananaCell:
    """Outcome of one method/stepsize cell of the banana grid."""

    method: str
    h: float
    status: str
    hausdorff_raw: float = math.nan
    hausdorff_gc: float = math.nan
    csv: str = ""
    error: str = ""


@dataclass
class BananaSummary:
    """Banana grid distances to the reference and the derived verdicts."""

    cells: list[BananaCell]
    ratios: dict[str, float] = field(default_factory=dict)
    verdicts: dict[str, bool] = field(default_factory=dict)

    def cell(self, method: str, h: float) -> BananaCell | None:
        """Find a cell by method name and stepsize."""
        for c in self.cells:
            if c.method == method and math.isclose(c.h, h):
                return c
        return None

    def evaluate(self, h_small: float, h_large: float) -> None:
        """Compare the modified method with the others at large and small h."""
        modified = self.cell("modified-boris", h_large)
        if modified is None or modified.status != "ok":
            self.verdicts["modified_large_step_ok"] = False
            return
        for name in ("boris-filtered", "boris"):
            other = self.cell(name, h_large)
            if other is None:
                continue
            # A blow-up of the other method counts as separated
            distance = other.hausdorff_gc if other.status == "ok" else math.inf
            ratio = distance / modified.hausdorff_gc if modified.hausdorff_gc > 0 else math.inf
            self.ratios[f"{name}_over_modified"] = ratio
            self.verdicts[f"modified_beats_{name}"] = ratio >= BANANA_SEPARATION
        boris = self.cell("boris", h_small)
        small = self.cell("modified-boris", h_small)
        if boris and small and boris.status == small.status == "ok":
            limit = BANANA_SMALL_STEP_RATIO * max(small.hausdorff_gc, 1e-300)
            self.verdicts["boris_small_step_ok"] = boris.hausdorff_gc <= limit


def _banana_task(args: tuple[FieldModel, IntegratorConfig]) -> tuple[Trajectory | None, str]:
    model, config = args
    try:
        return integrate(config, model), ""
    except (NonFinite, FieldDomainError) as exc:
        logger.warning("%s h=%g: %s", config.method, config.h, exc)
        return None, str(exc)


def cmd_banana(cfg: ExperimentConfig) -> BananaSummary:
    """
    Reproduce the banana-orbit grid: three methods at two stepsizes.

    Each cell's trajectory is compared with the fine-step reference in
    the projection plane, both as raw trace and as guiding-centre curve.
    Blow-ups are recorded as findings.
    """
    run = resolve(cfg)
    model = run.build_model()
    out = ensure_dir(cfg.out_dir)
    stepsizes = sorted(cfg.h_list or BANANA_STEPSIZES)
    methods = cfg.method_enums or [Method.from_name(m) for m in BANANA_METHODS]

    tasks = [
        (model, integrator_config(cfg, run, method, h, track_nondegeneracy=False))
        for method in methods
        for h in stepsizes
    ]
    tasks.append((model, integrator_config(cfg, run, Method.REFERENCE, stepsizes[0])))
    logger.info("banana: %d runs with %d worker(s)", len(tasks), cfg.workers)
    results = parallel_map(_banana_task, tasks, cfg.workers)

    reference, ref_error = results[-1]
    if reference is None:
        raise NonFinite(f"Reference run failed: {ref_error}")
    _save_trajectory(out, reference, model, run, cfg.seed)
    ref_raw = _projection(run.field_name, reference.x)
    assert reference.diagnostics is not None
    ref_gc = _projection(run.field_name, reference.diagnostics.gc)

    cells = []
    by_h: dict[float, list[Trajectory]] = {h: [] for h in stepsizes}
    for (_, config), (trajectory, error) in zip(tasks[:-1], results[:-1]):
        if trajectory is None:
            cells.append(BananaCell(str(config.method), config.h, "nonfinite", error=error))
            continue
        paths = _save_trajectory(out, trajectory, model, run, cfg.seed)
        assert trajectory.diagnostics is not None
        cells.append(
            BananaCell(
                method=str(config.method),
                h=config.h,
                status="ok",
                hausdorff_raw=hausdorff_distance(_projection(run.field_name, trajectory.x), ref_raw, cfg.seed),
                hausdorff_gc=hausdorff_distance(
                    _projection(run.field_name, trajectory.diagnostics.gc), ref_gc, cfg.seed
                ),
                csv=paths[0].name,
            )
        )
        by_h[config.h].append(trajectory)

    summary = BananaSummary(cells)
    summary.evaluate(stepsizes[0], stepsizes[-1])
    write_table_csv(out / "banana_summary.csv", [asdict(c) for c in cells])
    write_json(
        out / "banana_summary.json",
        {"cells": [asdict(c) for c in cells], "ratios": summary.ratios, "verdicts": summary.verdicts},
    )
    for c in cells:
        logger.info(
            "banana: %-15s h=%-5g %s raw=%.4g gc=%.4g",
            c.method,
            c.h,
            c.status,
            c.hausdorff_raw,
            c.hausdorff_gc,
        )
    for name, ok in summary.verdicts.items():
        logger.info("banana: %s %s", name, "PASS" if ok else "FAIL")

    if cfg.emit_plots:
        for h, trajectories in by_h.items():
            plot = LinePlot(title=f"Banana orbits, h = {h:g}", xlabel="R", ylabel="x3")
            plot.add_series("reference", ref_raw[:, 0], ref_raw[:, 1])
            for trajectory in trajectories:
                xy = _projection(run.field_name, trajectory.x)
                plot.add_series(str(trajectory.method), xy[:, 0], xy[:, 1])
            plot.save(out / f"banana_h{h:g}.svg")
    return summary


def cmd_converge(cfg: ExperimentConfig) -> ConvergenceTable:
    """
    Error sweep of the method against the reference over (h, eps).

    Writes the table, a JSON summary with plateau levels, ratios, fitted
    orders and verdicts, and optionally log-log plots of error vs eps.
    """
    run = resolve(cfg)
    model = run.build_model()
    out = ensure_dir(cfg.out_dir)
    eps_list = cfg.eps_list or eps_sweep(cfg.full)
    h_list = cfg.h_list or default_h_list(min(eps_list))
    if not h_list:
        h_list = [run.h]
    solver = runtime_config.solver
    settings = SweepSettings(
        method=run.methods[0],
        gyro_substeps=cfg.gyro_substeps,
        richardson=cfg.richardson,
        exact_phase=solver.exact_phase_reference,
        blowup_radius=solver.blowup_radius,
    )
    table = convergence_table(model, h_list, eps_list, run.T, run.initial, settings, cfg.workers)

    write_table_csv(out / "converge_table.csv", [row.as_dict() for row in table.rows])
    write_json(
        out / "converge_summary.json",
        {
            "method": str(settings.method),
            "analytic_jacobian": model.has_analytic_jacobian,
            "h_list": list(h_list),
            "eps_list": list(eps_list),
            "plateaus": {m: {f"{h:g}": v for h, v in levels.items()} for m, levels in table.plateaus.items()},
            "ratios": table.ratios,
            "orders": table.orders,
            "reference_mu_drift": {f"{e:.6g}": v for e, v in table.reference_mu_drift.items()},
            "verdicts": table.verdicts,
        },
    )
    for name, ok in table.verdicts.items():
        logger.info("converge: %s %s", name, "PASS" if ok else "FAIL")

    if cfg.emit_plots:
        for metric in ("err_x_final", "err_vpar_final", "err_vperp"):
            plot = LinePlot(title=f"{metric} vs eps", xlabel="eps", ylabel=metric, loglog=True)
            for h in table.h_values:
                eps, err = table.series(h, metric)
                plot.add_series(f"h = {h:g}", eps, err, markers=True)
            plot.save(out / f"converge_{metric}.svg")
    return table


@dataclass
class CheckResult:
    """Diagnostics of one checked run."""

    method: str
    h: float
    nonfinite: bool = False
    max_nondegeneracy: float | None = None
    mu_drift: float = math.nan
    energy_drift: float = math.nan
    northrop_max: float = math.nan
    error: str = ""


@dataclass
class CheckReport:
    """Outcome of cmd_check over all configured methods."""

    results: list[CheckResult]
    bound: float
    analytic_jacobian: bool = True

    @property
    def passed(self) -> bool:
        """True iff no run left the finite range and every norm is below the bound."""
        for r in self.results:
            if r.nonfinite:
                return False
            if r.max_nondegeneracy is not None and not r.max_nondegeneracy < self.bound:
                return False
        return True


def cmd_check(cfg: ExperimentConfig) -> CheckReport:
    """
    Run each method while tracking the nondegeneracy norm and invariants.

    Northrop residuals are sampled at NORTHROP_SAMPLES random trajectory
    points drawn with cfg.seed.
    """
    run = resolve(cfg)
    return check_model(cfg, run, run.build_model())


def check_model(cfg: ExperimentConfig, run: ResolvedExperiment, model: FieldModel) -> CheckReport:
    """Run the check of cmd_check against an already built field model."""
    out = ensure_dir(cfg.out_dir)
    rng = np.random.default_rng(cfg.seed)
    results = []
    for method in run.methods:
        config = integrator_config(cfg, run, method, run.h)
        try:
            trajectory = integrate(config, model)
        except (NonFinite, FieldDomainError) as exc:
            logger.error("check: %s h=%g failed: %s", method, run.h, exc)
            results.append(CheckResult(str(method), run.h, nonfinite=True, error=str(exc)))
            continue
        d = trajectory.diagnostics
        assert d is not None
        count = min(NORTHROP_SAMPLES, len(trajectory))
        samples = rng.choice(len(trajectory), size=count, replace=False)
        northrop = max(float(np.linalg.norm(northrop_residual(model, trajectory.x[i]))) for i in samples)
        results.append(
            CheckResult(
                method=str(method),
                h=run.h,
                max_nondegeneracy=d.max_nondegeneracy,
                mu_drift=magnetic_moment_drift(trajectory, model),
                energy_drift=float(np.max(np.abs(d.energy - d.energy[0]))),
                northrop_max=northrop,
            )
        )
    report = CheckReport(results, cfg.nondegeneracy_bound, model.has_analytic_jacobian)
    write_json(
        out / "check_report.json",
        {
            "field": run.field_name,
            "eps": model.eps,
            "regime_ratio": regime_ratio(run.h, model.eps),
            "bound": report.bound,
            "analytic_jacobian": report.analytic_jacobian,
            "passed": report.passed,
            "results": [asdict(r) for r in results],
        },
    )
    for r in results:
        logger.info(
            "check: %s h=%g nondegeneracy=%s mu_drift=%.3g energy_drift=%.3g northrop=%.3g",
            r.method,
            r.h,
            r.max_nondegeneracy,
            r.mu_drift,
            r.energy_drift,
            r.northrop_max,
        )
    logger.info("check: %s", "PASS" if report.passed else "FAIL")
    return report
