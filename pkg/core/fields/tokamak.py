"""Axisymmetric tokamak field without electric field."""

import numpy as np

from core.errors import FieldDomainError
from core.fields.base import FieldModel
from core.vecmath import Mat3, Vec3


class TokamakField(FieldModel):
    """
    Tokamak-like magnetic field in Cartesian coordinates.

    With R = sqrt(x1² + x2²):

        B1(x) = ( -(2 x2 + x1 x3) / (2 R²),
                   (2 x1 - x2 x3) / (2 R²),
                   (R - 1) / (2 R) )

    The field is run in its unscaled time variable, so the default
    eps is 1 and |B1| is close to 1 near R = 1. It is undefined on the
    axis R = 0. There is no electric field.

    |B1| is about 0.95 at the banana-orbit start (1.05, 0, 0), below the
    base-class floor of 1, so min_strength defaults to 0 and only
    |B1| > 0 is enforced.
    """

    def __init__(self, eps: float = 1.0, min_strength: float = 0.0) -> None:
        super().__init__(eps=eps, min_strength=min_strength)

    @property
    def name(self) -> str:
        return "tokamak"

    @staticmethod
    def _radius_squared(x: Vec3) -> np.ndarray:
        r2 = x[..., 0] ** 2 + x[..., 1] ** 2
        if np.any(r2 == 0.0):
            raise FieldDomainError("tokamak: field is undefined on the axis R = 0")
        return r2

    def b1(self, x: Vec3) -> Vec3:
        x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
        r2 = self._radius_squared(x)
        r = np.sqrt(r2)
        return np.stack(
            (
                -(2.0 * x2 + x1 * x3) / (2.0 * r2),
                (2.0 * x1 - x2 * x3) / (2.0 * r2),
                (r - 1.0) / (2.0 * r),
            ),
            axis=-1,
        )

    def b1_jacobian(self, x: Vec3) -> Mat3:
        x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
        r2 = self._radius_squared(x)
        r4 = r2 * r2
        r3 = r2 * np.sqrt(r2)
        a = 2.0 * x2 + x1 * x3
        c = 2.0 * x1 - x2 * x3
        zero = np.zeros_like(x1)
        rows = (
            (-x3 / (2.0 * r2) + x1 * a / r4, -1.0 / r2 + x2 * a / r4, -x1 / (2.0 * r2)),
            (1.0 / r2 - x1 * c / r4, -x3 / (2.0 * r2) - x2 * c / r4, -x2 / (2.0 * r2)),
            (x1 / (2.0 * r3), x2 / (2.0 * r3), zero),
        )
        return np.stack([np.stack(row, axis=-1) for row in rows], axis=-2)

    def electric(self, x: Vec3) -> Vec3:
        return np.zeros(np.shape(x))

    @staticmethod
    def major_radius(x: Vec3) -> np.ndarray:
        """Return R = sqrt(x1² + x2²) for the (R, x3) projection."""
        return np.sqrt(x[..., 0] ** 2 + x[..., 1] ** 2)
