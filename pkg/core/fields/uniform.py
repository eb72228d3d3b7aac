"""Uniform magnetic field with an optional constant electric field."""

from typing import Sequence

import numpy as np

from core.fields.base import FieldModel
from core.vecmath import Mat3, Vec3, vec3


class UniformField(FieldModel):
    """
    Constant field B1 = b0 and E = e0 (phi = -e0 · x).

    Gyration is exactly circular, which makes this field the closed-form
    oracle for the integrators.
    """

    def __init__(
        self,
        eps: float = 1.0,
        b0: Sequence[float] = (0.0, 0.0, 1.0),
        e0: Sequence[float] = (0.0, 0.0, 0.0),
        min_strength: float = 1.0,
    ) -> None:
        """
        Initialize the uniform field.

        Args:
            eps: The small parameter; B = b0 / eps
            b0: Constant eps-free magnetic field
            e0: Constant electric field
            min_strength: Floor on |b0|
        """
        super().__init__(eps=eps, min_strength=min_strength)
        self._b0 = vec3(b0)
        self._e0 = vec3(e0)

    @property
    def name(self) -> str:
        return "uniform"

    @property
    def b0(self) -> Vec3:
        """Return the eps-free field vector."""
        return self._b0.copy()

    @property
    def e0(self) -> Vec3:
        """Return the electric field vector."""
        return self._e0.copy()

    def b1(self, x: Vec3) -> Vec3:
        return np.broadcast_to(self._b0, np.shape(x)).copy()

    def b1_jacobian(self, x: Vec3) -> Mat3:
        return np.zeros(np.shape(x)[:-1] + (3, 3))

    def potential(self, x: Vec3) -> np.ndarray:
        return -np.sum(x * self._e0, axis=-1)

    def electric(self, x: Vec3) -> Vec3:
        return np.broadcast_to(self._e0, np.shape(x)).copy()

    def describe(self) -> dict[str, object]:
        info = super().describe()
        info.update(b0=self._b0.tolist(), e0=self._e0.tolist())
        return info
