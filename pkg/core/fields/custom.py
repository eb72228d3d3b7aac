"""Field models assembled from user callables."""

from typing import Callable

import numpy as np

from core.fields.base import FieldModel
from core.vecmath import Mat3, Vec3

VectorField = Callable[[Vec3], Vec3]
MatrixField = Callable[[Vec3], Mat3]
ScalarField = Callable[[Vec3], np.ndarray]


class CustomField(FieldModel):
    """
    Field defined by arbitrary callables.

    The Jacobian and the electric field may be omitted, in which case
    they are computed by central finite differences of B1 and phi.
    """

    def __init__(
        self,
        b1: VectorField,
        eps: float = 1.0,
        potential: ScalarField | None = None,
        b1_jacobian: MatrixField | None = None,
        electric: VectorField | None = None,
        min_strength: float = 1.0,
        name: str = "custom",
    ) -> None:
        super().__init__(eps=eps, min_strength=min_strength)
        self._b1 = b1
        self._potential = potential
        self._jacobian = b1_jacobian
        self._electric = electric
        self._name = name

    @property
    def name(self) -> str:
        return self._name

    @property
    def has_analytic_jacobian(self) -> bool:
        return self._jacobian is not None

    def b1(self, x: Vec3) -> Vec3:
        return np.asarray(self._b1(x), dtype=np.float64)

    def b1_jacobian(self, x: Vec3) -> Mat3 | None:
        if self._jacobian is None:
            return None
        return np.asarray(self._jacobian(x), dtype=np.float64)

    def potential(self, x: Vec3) -> np.ndarray:
        if self._potential is None:
            return super().potential(x)
        return np.asarray(self._potential(x), dtype=np.float64)

    def electric(self, x: Vec3) -> Vec3 | None:
        if self._electric is not None:
            return np.asarray(self._electric(x), dtype=np.float64)
        if self._potential is None:
            return np.zeros(np.shape(x))
        return None
