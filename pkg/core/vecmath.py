"""3D vector and matrix helpers on numpy arrays.

Vec3 is a float64 array of shape (3,) and Mat3 one of shape (3, 3).
Vector helpers also accept stacks of shape (..., 3) so that diagnostics
can be evaluated over a whole trajectory at once.
"""

import numpy as np
from numpy.typing import ArrayLike, NDArray

from core.errors import NonFinite, SingularMatrix

Vec3 = NDArray[np.float64]
Mat3 = NDArray[np.float64]

# Scale factor for the singularity test |det A| < SING_FACTOR * (max row norm)^3
SING_FACTOR = 1e-14

IDENTITY: Mat3 = np.eye(3)
IDENTITY.setflags(write=False)


def vec3(values: ArrayLike) -> Vec3:
    """Convert to a finite float64 vector of shape (3,)."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.shape != (3,):
        raise ValueError(f"Expected 3 components, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFinite(f"Non-finite vector components: {arr}")
    return arr


def mat3(values: ArrayLike) -> Mat3:
    """Convert to a finite float64 matrix of shape (3, 3), row-major."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.shape != (3, 3):
        raise ValueError(f"Expected 3x3 matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFinite(f"Non-finite matrix entries: {arr}")
    return arr


def cross(a: Vec3, b: Vec3) -> Vec3:
    """Right-handed cross product, broadcasting over leading axes."""
    a0, a1, a2 = a[..., 0], a[..., 1], a[..., 2]
    b0, b1, b2 = b[..., 0], b[..., 1], b[..., 2]
    return np.stack(
        (a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0),
        axis=-1,
    )


def dot(a: Vec3, b: Vec3) -> NDArray[np.float64] | float:
    """Dot product along the last axis."""
    return np.sum(a * b, axis=-1)


def norm(a: Vec3) -> NDArray[np.float64] | float:
    """Euclidean norm along the last axis."""
    return np.sqrt(np.sum(a * a, axis=-1))


def outer(a: Vec3, b: Vec3) -> Mat3:
    """Outer product a bᵀ (batched over leading axes)."""
    return a[..., :, None] * b[..., None, :]


def matvec(m: Mat3, v: Vec3) -> Vec3:
    """Matrix-vector product, batched over leading axes."""
    return np.einsum("...ij,...j->...i", m, v)


def cross_matrix(b: Vec3) -> Mat3:
    """
    Matrix Ω with Ω z = z × b.

    This is the linear map of the magnetic force for fixed field b.
    """
    return np.array(
        [
            [0.0, b[2], -b[1]],
            [-b[2], 0.0, b[0]],
            [b[1], -b[0], 0.0],
        ]
    )


def det3(m: Mat3) -> float:
    """Determinant via the scalar triple product of the rows."""
    return float(np.dot(m[0], cross(m[1], m[2])))


def solve3(a: Mat3, b: Vec3) -> Vec3:
    """
    Solve A x = b with the closed-form adjugate formula.

    Args:
        a: 3x3 system matrix
        b: right-hand side

    Returns:
        The solution x

    Raises:
        SingularMatrix: if |det A| < 1e-14 * (max row norm)^3
    """
    r0, r1, r2 = a[0], a[1], a[2]
    c12 = cross(r1, r2)
    c20 = cross(r2, r0)
    c01 = cross(r0, r1)
    det = float(np.dot(r0, c12))
    scale = float(np.max(norm(a)))
    tau = SING_FACTOR * scale**3
    if not abs(det) > tau:
        raise SingularMatrix(f"Matrix is singular: |det|={abs(det):.3e} <= {tau:.3e}")
    # Columns of the inverse are the row cross products divided by det.
    x = (c12 * b[0] + c20 * b[1] + c01 * b[2]) / det
    if not np.all(np.isfinite(x)):
        raise SingularMatrix("Solution is not finite")
    return x
