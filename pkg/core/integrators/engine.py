"""Trajectory integration: Boris-family methods and the two oracles."""

import logging
import math
import time

import numpy as np

from core.errors import NonFinite
from core.fields.base import FieldModel
from core.geometry import (
    guiding_center,
    guiding_center_velocity,
    magnetic_moment,
    nondegeneracy_condition,
)
from core.integrators.boris import (
    boris_kick,
    boris_two_step,
    endpoint_velocity,
    filter_initial_velocity,
    startup_half_velocity,
    startup_position,
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
from core.vecmath import dot, norm

logger = logging.getLogger(__name__)

# Substep reduction of the pilot run that sizes the oracle fine step
PILOT_RESOLUTION = 8


def regime_ratio(h: float, eps: float) -> float:
    """Return h²/eps, the quantity bounded by the large-step regime."""
    return h * h / eps


def _substeps_for(config: IntegratorConfig, strength: float) -> int:
    per_gyro = math.ceil(config.gyro_substeps * config.h * strength / (2.0 * math.pi))
    return max(config.ref_substeps, per_gyro)


def reference_substeps(
    config: IntegratorConfig,
    model: FieldModel,
    initial: ParticleState | None = None,
    mu0: float = 0.0,
    use_mod: bool = False,
) -> int:
    """
    Fine substeps per output step for the oracles.

    At least config.ref_substeps, and enough that config.gyro_substeps
    steps resolve one gyroperiod at the largest |B| met along the run.
    That |B| is taken on the output grid of a pilot run with
    PILOT_RESOLUTION times fewer substeps, started from initial
    (config.initial by default) with the force given by mu0 and use_mod.
    """
    initial = config.initial if initial is None else initial
    at_start = _substeps_for(config, float(model.eval_abs_B(initial.x)))
    pilot = max(1, at_start // PILOT_RESOLUTION)
    xs, _ = _leapfrog(
        initial,
        config.h,
        config.num_steps,
        pilot,
        model,
        mu0,
        use_mod,
        True,
        config.blowup_radius,
    )
    peak = float(np.max(model.eval_abs_B(xs)))
    substeps = max(at_start, _substeps_for(config, peak))
    logger.debug("substeps: %d at the start, %d for peak |B| = %.6g", at_start, substeps, peak)
    return substeps


def _check_position(x: np.ndarray, limit2: float, step: int) -> None:
    if not float(x @ x) <= limit2:
        raise NonFinite(f"Position left the finite range at step {step}: {x}", step=step)


def _leapfrog(
    initial: ParticleState,
    h: float,
    num_steps: int,
    substeps: int,
    model: FieldModel,
    mu0: float,
    use_mod: bool,
    exact_phase: bool,
    blowup_radius: float,
) -> tuple[np.ndarray, np.ndarray]:
    """
    One-step Boris on the fine grid h / substeps, sampled every substeps.

    The sampled velocity is the average of the half-step velocities
    around each output point, equal to the symmetric difference of the
    fine positions. The kick at the last position yields the endpoint
    velocity.
    """
    xs = np.empty((num_steps + 1, 3))
    vs = np.empty((num_steps + 1, 3))
    xs[0] = initial.x
    vs[0] = initial.v
    if num_steps == 0:
        return xs, vs

    fine = h / substeps
    limit2 = blowup_radius * blowup_radius
    x = initial.x
    v_half = startup_half_velocity(initial, fine, model, mu0, use_mod)
    for k in range(1, num_steps * substeps + 1):
        v_prev = v_half
        x = x + fine * v_half
        _check_position(x, limit2, k)
        v_half = boris_kick(x, v_half, fine, model, mu0, use_mod, exact_phase)
        if k % substeps == 0:
            n = k // substeps
            xs[n] = x
            vs[n] = 0.5 * (v_prev + v_half)
    return xs, vs


def _two_step(
    initial: ParticleState,
    h: float,
    num_steps: int,
    model: FieldModel,
    mu0: float,
    use_mod: bool,
    blowup_radius: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Two-step Boris recurrence with symmetric-difference velocities."""
    xs = np.empty((num_steps + 1, 3))
    vs = np.empty((num_steps + 1, 3))
    xs[0] = initial.x
    vs[0] = initial.v
    if num_steps == 0:
        return xs, vs

    limit2 = blowup_radius * blowup_radius
    xs[1] = startup_position(initial, h, model, mu0, use_mod)
    _check_position(xs[1], limit2, 1)
    for n in range(1, num_steps):
        xs[n + 1] = boris_two_step(xs[n - 1], xs[n], h, model, mu0, use_mod)
        _check_position(xs[n + 1], limit2, n + 1)
        vs[n] = (xs[n + 1] - xs[n - 1]) / (2.0 * h)
    v_half = (xs[num_steps] - xs[num_steps - 1]) / h
    vs[num_steps] = endpoint_velocity(xs[num_steps], v_half, h, model, mu0, use_mod)
    return xs, vs


def populate_diagnostics(
    trajectory: Trajectory,
    model: FieldModel,
    nondegeneracy: bool = False,
) -> TrajectoryDiagnostics:
    """
    Compute the per-step diagnostic series of a trajectory.

    mu, energy, signed v_par, |v_perp| and the guiding centre are
    evaluated on the whole (N, 3) stack at once; the nondegeneracy norm
    is evaluated point by point when requested.
    """
    x, v = trajectory.x, trajectory.v
    b = model.eval_B(x)
    strength = norm(b)
    b_hat = b / strength[:, None]
    vpar = dot(v, b_hat)
    vperp = norm(v - vpar[:, None] * b_hat)
    nondeg = None
    if nondegeneracy:
        nondeg = np.array(
            [nondegeneracy_condition(x[i], v[i], trajectory.h, model) for i in range(len(x))]
        )
    diagnostics = TrajectoryDiagnostics(
        mu=magnetic_moment(x, v, model),
        energy=model.energy(x, v),
        vpar=vpar,
        vperp=vperp,
        gc=guiding_center(x, v, model),
        nondegeneracy=nondeg,
    )
    trajectory.diagnostics = diagnostics
    return diagnostics


def initial_magnetic_moment(config: IntegratorConfig, model: FieldModel) -> float:
    """Frozen mu0 from the unfiltered initial state, or the override."""
    if config.mu0_override is not None:
        return float(config.mu0_override)
    return float(magnetic_moment(config.initial.x, config.initial.v, model))


def integrate(config: IntegratorConfig, model: FieldModel) -> Trajectory:
    """
    Run the configured method from t = 0 to T.

    Filtered methods start from P_par v; modified-boris freezes mu0 from
    the unfiltered initial velocity. Methods reference and gc-ode are
    delegated to their solvers.

    Raises:
        NonFinite: if the position leaves the finite range
        FieldDomainError: if the field is evaluated outside its domain
    """
    method = config.method
    if method == Method.REFERENCE:
        return reference_solution(config, model)
    if method == Method.GC_ODE:
        return gc_ode_solve(config, model, initial_magnetic_moment(config, model))

    ratio = regime_ratio(config.h, model.eps)
    if not config.regime_min <= ratio <= config.regime_max:
        logger.warning(
            "%s: h²/eps = %.4g outside [%.4g, %.4g]",
            method,
            ratio,
            config.regime_min,
            config.regime_max,
        )

    start = time.perf_counter()
    use_mod = method.uses_modified_force
    mu0 = initial_magnetic_moment(config, model) if use_mod else 0.0
    initial = config.initial
    if method.filters_initial_velocity:
        initial = filter_initial_velocity(initial, model)

    num_steps = config.num_steps
    logger.info("%s: h=%g, %d steps, eps=%g", method, config.h, num_steps, model.eps)
    if config.formulation == Formulation.TWO_STEP:
        xs, vs = _two_step(initial, config.h, num_steps, model, mu0, use_mod, config.blowup_radius)
    else:
        xs, vs = _leapfrog(
            initial,
            config.h,
            num_steps,
            1,
            model,
            mu0,
            use_mod,
            False,
            config.blowup_radius,
        )

    trajectory = Trajectory(
        method=method,
        h=config.h,
        t=time_grid(config.h, num_steps),
        x=xs,
        v=vs,
        mu0=mu0,
    )
    diagnostics = populate_diagnostics(trajectory, model, config.track_nondegeneracy)
    wall = time.perf_counter() - start
    trajectory.metadata.update(
        method=str(method),
        formulation=config.formulation.value,
        h=config.h,
        eps=model.eps,
        regime_ratio=ratio,
        mu0=mu0,
        wall_time=wall,
        max_nondegeneracy=diagnostics.max_nondegeneracy,
    )
    logger.info("%s: finished in %.2fs", method, wall)
    return trajectory


def _fine_run(
    config: IntegratorConfig,
    model: FieldModel,
    initial: ParticleState,
    substeps: int,
    mu0: float,
    use_mod: bool,
) -> tuple[np.ndarray, np.ndarray]:
    logger.debug("fine run: %d substeps per output step", substeps)
    return _leapfrog(
        initial,
        config.h,
        config.num_steps,
        substeps,
        model,
        mu0,
        use_mod,
        config.exact_phase,
        config.blowup_radius,
    )


def _relative_change(coarse: np.ndarray, fine: np.ndarray) -> float:
    scale = max(float(np.max(norm(fine))), 1e-300)
    return float(np.max(norm(coarse - fine))) / scale


def _oracle_run(
    config: IntegratorConfig,
    model: FieldModel,
    initial: ParticleState,
    mu0: float,
    use_mod: bool,
) -> tuple[np.ndarray, np.ndarray, dict[str, object]]:
    substeps = reference_substeps(config, model, initial, mu0, use_mod)
    xs, vs = _fine_run(config, model, initial, substeps, mu0, use_mod)
    info: dict[str, object] = {"substeps": substeps, "exact_phase": config.exact_phase}
    if config.richardson:
        xs_fine, vs_fine = _fine_run(config, model, initial, 2 * substeps, mu0, use_mod)
        change = _relative_change(xs, xs_fine)
        passed = change < config.richardson_tol
        if not passed:
            logger.warning(
                "Richardson check failed: relative change %.3g >= %.3g",
                change,
                config.richardson_tol,
            )
        info.update(substeps=2 * substeps, richardson_change=change, richardson_passed=passed)
        xs, vs = xs_fine, vs_fine
    return xs, vs, info


def reference_solution(config: IntegratorConfig, model: FieldModel) -> Trajectory:
    """
    Fine-step Boris solution of the full equations of motion.

    The fine step resolves each gyroperiod with config.gyro_substeps
    steps and is sampled on the output grid t_n = n h. With
    config.richardson the run is repeated with half the fine step, the
    relative change in the positions is recorded, and the finer run is
    returned.
    """
    start = time.perf_counter()
    xs, vs, info = _oracle_run(config, model, config.initial, 0.0, False)
    trajectory = Trajectory(
        method=Method.REFERENCE,
        h=config.h,
        t=time_grid(config.h, config.num_steps),
        x=xs,
        v=vs,
    )
    populate_diagnostics(trajectory, model)
    wall = time.perf_counter() - start
    trajectory.metadata.update(info, method=str(Method.REFERENCE), h=config.h, eps=model.eps, wall_time=wall)
    logger.info("reference: %d substeps, finished in %.2fs", info["substeps"], wall)
    return trajectory


def gc_ode_solve(config: IntegratorConfig, model: FieldModel, mu0: float) -> Trajectory:
    """
    Integrate the guiding-centre equation z'' = z' × B(z) + E(z) - mu0 grad|B|(z).

    Starts from the guiding centre of the initial state with the
    guiding-centre velocity of that state, and uses the fine step of the
    reference solver since any residual gyration still turns at |B|.
    The stored positions are guiding-centre positions.
    """
    start = time.perf_counter()
    z0 = guiding_center(config.initial.x, config.initial.v, model)
    w0 = guiding_center_velocity(
        config.initial.x,
        config.initial.v,
        model,
        include_correction=config.gc_velocity_correction,
        mu0=mu0,
    )
    initial = ParticleState(z0, w0, config.initial.t)
    xs, vs, info = _oracle_run(config, model, initial, mu0, True)
    trajectory = Trajectory(
        method=Method.GC_ODE,
        h=config.h,
        t=time_grid(config.h, config.num_steps),
        x=xs,
        v=vs,
        mu0=mu0,
    )
    populate_diagnostics(trajectory, model)
    wall = time.perf_counter() - start
    trajectory.metadata.update(info, method=str(Method.GC_ODE), h=config.h, eps=model.eps, mu0=mu0, wall_time=wall)
    logger.info("gc-ode: %d substeps, finished in %.2fs", info["substeps"], wall)
    return trajectory


class ReferenceCache:
    """
    Reference trajectories keyed by eps, reused across output stepsizes.

    A reference is computed once on the finest grid h_min and
    subsampled for every h that is an integer multiple of h_min.
    """

    def __init__(self, h_min: float) -> None:
        if not h_min > 0:
            raise ValueError("h_min must be positive")
        self.h_min = h_min
        self._cache: dict[float, Trajectory] = {}

    def __contains__(self, eps: float) -> bool:
        return eps in self._cache

    def __len__(self) -> int:
        return len(self._cache)

    def stride(self, h: float) -> int:
        """Return h / h_min, which must be a positive integer."""
        ratio = h / self.h_min
        stride = int(round(ratio))
        if stride < 1 or abs(ratio - stride) > 1e-9 * ratio:
            raise ValueError(f"h = {h} is not an integer multiple of {self.h_min}")
        return stride

    def store(self, eps: float, trajectory: Trajectory) -> None:
        """Store a reference computed on the h_min grid."""
        if abs(trajectory.h - self.h_min) > 1e-12 * self.h_min:
            raise ValueError("cached references must use the h_min grid")
        self._cache[eps] = trajectory

    def get(self, config: IntegratorConfig, model: FieldModel) -> Trajectory:
        """Return the reference for model.eps on the grid of config.h."""
        stride = self.stride(config.h)
        eps = model.eps
        if eps not in self._cache:
            fine_config = config.replace(method=Method.REFERENCE, h=self.h_min)
            self._cache[eps] = reference_solution(fine_config, model)
        else:
            logger.debug("reference cache hit for eps=%g", eps)
        reference = self._cache[eps].subsample(stride).truncate(config.num_steps)
        populate_diagnostics(reference, model)
        return reference
