"""Boris time steps in one-step (leapfrog) and two-step form."""

import math

from core.fields.base import FieldModel
from core.geometry import projectors
from core.integrators.state import ParticleState
from core.vecmath import IDENTITY, Vec3, cross, cross_matrix, solve3


def filter_initial_velocity(state: ParticleState, model: FieldModel) -> ParticleState:
    """
    Replace v by P_par(x) v, removing the gyration from the initial data.

    Raises:
        ZeroField: if B(x) = 0
    """
    proj = projectors(model.eval_B(state.x))
    return state.with_velocity(proj.P_par @ state.v)


def force(model: FieldModel, x: Vec3, mu0: float, use_mod: bool) -> Vec3:
    """Electric force E(x), or E(x) - mu0 grad|B|(x) with use_mod."""
    if use_mod and mu0 != 0.0:
        return model.modified_E(x, mu0)
    return model.eval_E(x)


def boris_rotate(v: Vec3, b: Vec3, h: float, exact_phase: bool = False) -> Vec3:
    """
    Rotate v about b as the magnetic part of one Boris step.

    The standard rotation uses t = (h/2) B, which turns v by
    2 atan(h|B|/2). With exact_phase the half-angle tangent is set to
    tan(h|B|/2) so the rotation angle is exactly h|B|.

    Args:
        v: Velocity after the first half kick
        b: Magnetic field at the current position
        h: Stepsize
        exact_phase: Use the gyrofrequency-exact rotation angle
    """
    if exact_phase:
        strength = math.sqrt(float(b @ b))
        if strength == 0.0:
            return v
        half_angle = 0.5 * h * strength
        t = math.tan(half_angle) / strength * b
    else:
        t = 0.5 * h * b
    s = 2.0 * t / (1.0 + float(t @ t))
    v_prime = v + cross(v, t)
    return v + cross(v_prime, s)


def boris_kick(
    x: Vec3,
    v_half: Vec3,
    h: float,
    model: FieldModel,
    mu0: float,
    use_mod: bool,
    exact_phase: bool = False,
) -> Vec3:
    """
    Velocity update v^{n-1/2} -> v^{n+1/2} at position x^n.

    Half kick by (h/2) F, Boris rotation with B(x), half kick by (h/2) F.
    """
    f = force(model, x, mu0, use_mod)
    v_minus = v_half + 0.5 * h * f
    v_plus = boris_rotate(v_minus, model.eval_B(x), h, exact_phase)
    return v_plus + 0.5 * h * f


def boris_one_step(
    state: ParticleState,
    h: float,
    model: FieldModel,
    mu0: float,
    use_mod: bool,
    exact_phase: bool = False,
) -> ParticleState:
    """
    One leapfrog Boris step.

    The incoming state carries x^n and the half-step velocity v^{n-1/2};
    the result carries x^{n+1} = x^n + h v^{n+1/2} and v^{n+1/2}.

    Raises:
        ZeroField: if B(x^n) = 0
    """
    v_new = boris_kick(state.x, state.v, h, model, mu0, use_mod, exact_phase)
    return ParticleState(state.x + h * v_new, v_new, state.t + h)


def boris_two_step(
    x_prev: Vec3,
    x_curr: Vec3,
    h: float,
    model: FieldModel,
    mu0: float,
    use_mod: bool,
) -> Vec3:
    """
    Two-step Boris recurrence for x^{n+1}.

        (x^{n+1} - 2x^n + x^{n-1}) / h² = v^n × B(x^n) + F(x^n)

    with v^n = (x^{n+1} - x^{n-1}) / (2h). The unknown enters linearly, so
    (I - (h/2) Ω) x^{n+1} = rhs is solved exactly, where Ω z = z × B(x^n);
    the determinant is 1 + (h|B|/2)² > 0.
    """
    b = model.eval_B(x_curr)
    omega = cross_matrix(b)
    rhs = 2.0 * x_curr - x_prev - 0.5 * h * cross(x_prev, b) + h * h * force(model, x_curr, mu0, use_mod)
    system = IDENTITY - 0.5 * h * omega
    return solve3(system, rhs)


def startup_half_velocity(
    state: ParticleState,
    h: float,
    model: FieldModel,
    mu0: float,
    use_mod: bool,
) -> Vec3:
    """Leapfrog start v^{1/2} = v^0 + (h/2)(v^0 × B(x^0) + F(x^0))."""
    b = model.eval_B(state.x)
    return state.v + 0.5 * h * (cross(state.v, b) + force(model, state.x, mu0, use_mod))


def startup_position(
    state: ParticleState,
    h: float,
    model: FieldModel,
    mu0: float,
    use_mod: bool,
) -> Vec3:
    """Two-step start x^1 = x^0 + h v^0 + (h²/2)(v^0 × B(x^0) + F(x^0))."""
    return state.x + h * startup_half_velocity(state, h, model, mu0, use_mod)


def endpoint_velocity(
    x_last: Vec3,
    v_half: Vec3,
    h: float,
    model: FieldModel,
    mu0: float,
    use_mod: bool,
) -> Vec3:
    """
    Velocity at the final grid point from the backward half step.

    Solves v^N = v^{N-1/2} + (h/2)(v^N × B(x^N) + F(x^N)), which coincides
    with the symmetric difference of the positions around x^N.
    """
    b = model.eval_B(x_last)
    rhs = v_half + 0.5 * h * force(model, x_last, mu0, use_mod)
    return solve3(IDENTITY - 0.5 * h * cross_matrix(b), rhs)
