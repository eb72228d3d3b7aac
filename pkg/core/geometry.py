"""Magnetic geometry: projectors, local frame, magnetic moment, guiding centre."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import directed_hausdorff

from core.errors import ZeroField
from core.fields.base import FieldModel
from core.vecmath import IDENTITY, Mat3, Vec3, cross, dot, matvec, norm, outer

# Switch the frame completion axis when e1 is this close to x-hat
_FRAME_SWITCH = 0.9


@dataclass(frozen=True)
class Frame:
    """Right-handed orthonormal frame with e1 along B."""

    e1: Vec3
    e2: Vec3
    e3: Vec3

    def as_matrix(self) -> Mat3:
        """Return the matrix with columns e1, e2, e3."""
        return np.column_stack((self.e1, self.e2, self.e3))


@dataclass(frozen=True)
class Projectors:
    """Orthogonal projections onto span(B) and its complement."""

    P_par: Mat3
    P_perp: Mat3


def _unit(b: Vec3) -> Vec3:
    strength = norm(b)
    if np.any(strength == 0.0):
        raise ZeroField("Magnetic field vanishes; direction undefined")
    return b / np.asarray(strength)[..., None]


def projectors(B: Vec3) -> Projectors:
    """
    Build P_par = b bᵀ and P_perp = I - P_par with b = B / |B|.

    Raises:
        ZeroField: if |B| = 0
    """
    b = _unit(np.asarray(B, dtype=np.float64))
    p_par = outer(b, b)
    return Projectors(P_par=p_par, P_perp=IDENTITY - p_par)


def local_frame(B: Vec3) -> Frame:
    """
    Complete b = B / |B| to a right-handed orthonormal frame.

    e2 = normalize(e1 × a) with a = x-hat, or y-hat when |e1 · x-hat| > 0.9,
    and e3 = e1 × e2.

    Raises:
        ZeroField: if |B| = 0
    """
    e1 = _unit(np.asarray(B, dtype=np.float64))
    axis = np.array([0.0, 1.0, 0.0]) if abs(e1[0]) > _FRAME_SWITCH else np.array([1.0, 0.0, 0.0])
    e2 = cross(e1, axis)
    e2 = e2 / norm(e2)
    e3 = cross(e1, e2)
    return Frame(e1=e1, e2=e2, e3=e3)


def parallel_velocity(x: Vec3, v: Vec3, model: FieldModel) -> Vec3:
    """Return P_par(x) v."""
    b = _unit(model.eval_B(x))
    return np.asarray(dot(v, b))[..., None] * b


def perpendicular_velocity(x: Vec3, v: Vec3, model: FieldModel) -> Vec3:
    """Return P_perp(x) v."""
    return v - parallel_velocity(x, v, model)


def magnetic_moment(x: Vec3, v: Vec3, model: FieldModel) -> np.ndarray:
    """
    Magnetic moment mu(x, v) = |v × B(x)|² / (2 |B(x)|³).

    Accepts single states or stacks of states.
    """
    b = model.eval_B(x)
    vxb = cross(v, b)
    return 0.5 * dot(vxb, vxb) / norm(b) ** 3


def gyroradius(x: Vec3, v: Vec3, model: FieldModel) -> np.ndarray:
    """Return |P_perp v| / |B|."""
    return norm(perpendicular_velocity(x, v, model)) / model.eval_abs_B(x)


def guiding_center(x: Vec3, v: Vec3, model: FieldModel) -> Vec3:
    """
    Leading-order guiding centre x + (v × B(x)) / |B(x)|².

    The neglected terms are O(eps²).
    """
    b = model.eval_B(x)
    return x + cross(v, b) / np.asarray(dot(b, b))[..., None]


def northrop_residual(model: FieldModel, x: Vec3) -> Vec3:
    """
    Residual of e2 × B'e3 - e3 × B'e2 = -grad|B| at x.

    Algebraically the residual equals (div B) b, so it vanishes for every
    divergence-free field and does not depend on the choice of e2, e3.
    """
    frame = local_frame(model.eval_B(x))
    jac = model.eval_B_jacobian(x)
    lhs = cross(frame.e2, jac @ frame.e3) - cross(frame.e3, jac @ frame.e2)
    return lhs + model.grad_abs_B(x)


def nondegeneracy_matrix(x: Vec3, v: Vec3, h: float, model: FieldModel) -> np.ndarray:
    """
    2x2 matrix of z ↦ z + h²/4 P_perp(v × B'(x) z) on span{e2, e3}.

    Entry [a, b] is e_a · L(e_b); P_perp drops out because e_a ⊥ B.
    """
    frame = local_frame(model.eval_B(x))
    jac = model.eval_B_jacobian(x)
    basis = (frame.e2, frame.e3)
    images = [cross(v, jac @ e) for e in basis]
    coupling = np.array([[float(a @ image) for image in images] for a in basis])
    return np.eye(2) + 0.25 * h * h * coupling


def nondegeneracy_condition(x: Vec3, v: Vec3, h: float, model: FieldModel) -> float:
    """
    Operator norm of the inverse of the nondegeneracy map on the normal plane.

    Computed as 1 / sigma_min of the 2x2 frame matrix in closed form.

    Returns:
        The inverse norm (>= 0), or math.inf when the map is singular
    """
    if not h > 0:
        raise ValueError("h must be positive")
    m = nondegeneracy_matrix(x, v, h, model)
    det = abs(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    frob2 = float(np.sum(m * m))
    sigma_max = math.sqrt(0.5 * (frob2 + math.sqrt(max(frob2 * frob2 - 4.0 * det * det, 0.0))))
    if det == 0.0 or sigma_max == 0.0:
        return math.inf
    sigma_min = det / sigma_max
    return 1.0 / sigma_min


def unit_field_jacobian(model: FieldModel, x: Vec3) -> Mat3:
    """Jacobian of b = B/|B|: b' = B'/|B| - B (grad|B|)ᵀ / |B|²."""
    b = model.eval_B(x)
    strength = norm(b)
    return model.eval_B_jacobian(x) / strength - outer(b, model.grad_abs_B(x)) / strength**2


def drift_velocity(model: FieldModel, y: Vec3, ydot: Vec3, mu0: float) -> Vec3:
    """
    Perpendicular guiding-centre velocity from the slow drifts.

        P_perp ż = (1/|B|) P_par ż × db/dt + (1/|B|²) (E - mu0 grad|B|) × B

    with db/dt = b'(y) ydot. Diagnostic only.
    """
    b_vec = model.eval_B(y)
    strength = norm(b_vec)
    b_hat = b_vec / strength
    db_dt = matvec(unit_field_jacobian(model, y), ydot)
    v_par = dot(ydot, b_hat) * b_hat
    force = model.modified_E(y, mu0)
    return cross(v_par, db_dt) / strength + cross(force, b_vec) / strength**2


def guiding_center_velocity(
    x: Vec3,
    v: Vec3,
    model: FieldModel,
    include_correction: bool = False,
    mu0: float | None = None,
) -> Vec3:
    """
    Initial guiding-centre velocity for a particle state (x, v).

    The parallel part is P_par v evaluated at the guiding centre, with the
    centring function chosen equal to the initial guiding centre so that
    its transport term vanishes. With include_correction the O(eps) term
    (1/|B|²) P_par (P_par v × B' P_perp v) is added. The perpendicular part
    is the drift velocity at the frozen magnetic moment mu0, which
    defaults to mu(x, v).
    """
    z0 = guiding_center(x, v, model)
    proj = projectors(model.eval_B(z0))
    v_par = proj.P_par @ v
    if include_correction:
        b = model.eval_B(z0)
        jac = model.eval_B_jacobian(z0)
        v_par = v_par + proj.P_par @ cross(v_par, jac @ (proj.P_perp @ v)) / float(b @ b)
    if mu0 is None:
        mu0 = float(magnetic_moment(x, v, model))
    return v_par + drift_velocity(model, z0, v_par, mu0)


def hausdorff_distance(a: np.ndarray, b: np.ndarray, seed: int = 0) -> float:
    """
    Symmetric discrete Hausdorff distance between two point clouds.

    seed fixes the point shuffling of the early-exit search; the value
    does not depend on it.
    """
    if len(a) == 0 or len(b) == 0:
        return math.inf
    return max(directed_hausdorff(a, b, seed)[0], directed_hausdorff(b, a, seed)[0])
