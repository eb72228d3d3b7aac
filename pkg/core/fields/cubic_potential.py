"""Linear magnetic field with a quartic scalar potential."""

import numpy as np

from core.fields.base import FieldModel
from core.vecmath import Mat3, Vec3

_JACOBIAN = 0.5 * np.array(
    [
        [0.0, 1.0, -1.0],
        [1.0, 0.0, 1.0],
        [-1.0, 1.0, 0.0],
    ]
)
_JACOBIAN.setflags(write=False)


class CubicPotentialField(FieldModel):
    """
    Order-of-accuracy test field.

        B1(x) = (1/2) (x2 - x3, x1 + x3, x2 - x1)
        phi(x) = x1³ - x2³ + x1⁴/5 + x2⁴ + x3⁴

    B1 is linear, so its Jacobian is constant; it is both divergence-
    and curl-free. |B1| is about 0.67 at the initial value (0, 1, 0.1),
    below the base-class floor of 1, so min_strength defaults to 0 and
    only |B1| > 0 is enforced.
    """

    def __init__(self, eps: float = 2.0**-13, min_strength: float = 0.0) -> None:
        super().__init__(eps=eps, min_strength=min_strength)

    @property
    def name(self) -> str:
        return "cubic-potential"

    def b1(self, x: Vec3) -> Vec3:
        x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
        return 0.5 * np.stack((x2 - x3, x1 + x3, x2 - x1), axis=-1)

    def b1_jacobian(self, x: Vec3) -> Mat3:
        return np.broadcast_to(_JACOBIAN, np.shape(x)[:-1] + (3, 3)).copy()

    def potential(self, x: Vec3) -> np.ndarray:
        x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
        return x1**3 - x2**3 + 0.2 * x1**4 + x2**4 + x3**4

    def electric(self, x: Vec3) -> Vec3:
        x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
        return -np.stack(
            (3.0 * x1**2 + 0.8 * x1**3, -3.0 * x2**2 + 4.0 * x2**3, 4.0 * x3**3),
            axis=-1,
        )
