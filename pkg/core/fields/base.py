"""Abstract base class for magnetic/electric field models."""

import copy
import logging
from abc import ABC, abstractmethod

import numpy as np

from core.errors import FieldDomainError, ZeroField
from core.vecmath import Mat3, Vec3, norm

logger = logging.getLogger(__name__)

# Relative finite-difference step for Jacobians and gradients
FD_STEP = 1e-6


def fd_step(x: Vec3) -> Vec3:
    """Per-component central-difference step max(1e-6, 1e-6 |x_j|)."""
    return np.maximum(FD_STEP, FD_STEP * np.abs(x))


class FieldModel(ABC):
    """
    Abstract base class for a static electromagnetic field.

    The magnetic field is B(x) = B1(x) / eps with an eps-free field B1,
    and the electric field derives from a scalar potential, E = -grad(phi).
    Subclasses provide B1 and phi; the analytic Jacobian of B1 and the
    analytic electric field are optional and fall back to central
    finite differences.

    Every evaluation accepts a single point of shape (3,) or a stack of
    points of shape (..., 3).
    """

    def __init__(self, eps: float = 1.0, min_strength: float = 1.0) -> None:
        """
        Initialize the field model.

        Args:
            eps: The small parameter; B = B1 / eps
            min_strength: Lower bound on |B1| enforced at every evaluation
        """
        if not eps > 0:
            raise ValueError("eps must be positive")
        if min_strength < 0:
            raise ValueError("min_strength must be non-negative")
        self._eps = float(eps)
        self._min_strength = float(min_strength)
        self._fd_warned = False

    @property
    @abstractmethod
    def name(self) -> str:
        """Return the registry name of the field."""
        ...

    @abstractmethod
    def b1(self, x: Vec3) -> Vec3:
        """Evaluate the eps-free magnetic field B1(x)."""
        ...

    def b1_jacobian(self, x: Vec3) -> Mat3 | None:
        """
        Analytic Jacobian of B1, entry [i, j] = dB1_i / dx_j.

        Returns None when the model has no closed form; callers then use
        finite differences.
        """
        return None

    def potential(self, x: Vec3) -> np.ndarray:
        """Scalar potential phi(x). Zero unless overridden."""
        return np.zeros(np.shape(x)[:-1])

    def electric(self, x: Vec3) -> Vec3 | None:
        """Analytic electric field -grad(phi), or None to differentiate phi."""
        return None

    @property
    def eps(self) -> float:
        """Return the small parameter."""
        return self._eps

    @property
    def min_strength(self) -> float:
        """Return the enforced floor on |B1|."""
        return self._min_strength

    @property
    def has_analytic_jacobian(self) -> bool:
        """Check whether B1' is available in closed form."""
        return type(self).b1_jacobian is not FieldModel.b1_jacobian

    def with_eps(self, eps: float) -> "FieldModel":
        """Return a copy sharing B1 and phi but with a different eps."""
        if not eps > 0:
            raise ValueError("eps must be positive")
        clone = copy.copy(self)
        clone._eps = float(eps)
        return clone

    def _checked_b1(self, x: Vec3) -> Vec3:
        b1 = self.b1(x)
        strength = norm(b1)
        if not np.all(np.isfinite(strength)):
            raise FieldDomainError(f"{self.name}: field is not finite at {x}")
        if np.any(strength == 0.0):
            raise ZeroField(f"{self.name}: magnetic field vanishes at {x}")
        if np.any(strength < self._min_strength):
            raise FieldDomainError(
                f"{self.name}: |B1| = {np.min(strength):.6g} below "
                f"{self._min_strength:.6g} at {x}"
            )
        return b1

    def eval_B(self, x: Vec3) -> Vec3:
        """
        Evaluate B(x) = B1(x) / eps.

        Raises:
            ZeroField: if B1 vanishes at x
            FieldDomainError: if |B1| is non-finite or below min_strength
        """
        return self._checked_b1(x) / self._eps

    def eval_abs_B(self, x: Vec3) -> np.ndarray:
        """Evaluate |B(x)|."""
        return norm(self.eval_B(x))

    def eval_B_jacobian(self, x: Vec3) -> Mat3:
        """
        Evaluate B'(x) = B1'(x) / eps.

        Uses the analytic Jacobian when the model provides one and central
        finite differences of B1 otherwise.
        """
        jac = self.b1_jacobian(x)
        if jac is None:
            if not self._fd_warned:
                logger.warning("%s: no analytic Jacobian, using finite differences", self.name)
                self._fd_warned = True
            jac = self._fd_jacobian(x)
        return jac / self._eps

    def _fd_jacobian(self, x: Vec3) -> Mat3:
        x = np.asarray(x, dtype=np.float64)
        step = fd_step(x)
        columns = []
        for j in range(3):
            dx = np.zeros_like(x)
            dx[..., j] = step[..., j]
            diff = self.b1(x + dx) - self.b1(x - dx)
            columns.append(diff / (2.0 * step[..., j : j + 1]))
        return np.stack(columns, axis=-1)

    def grad_abs_B(self, x: Vec3) -> Vec3:
        """
        Evaluate grad|B|(x) = B'(x)ᵀ B(x) / |B(x)|.

        Raises:
            FieldDomainError: propagated from eval_B
        """
        b = self.eval_B(x)
        jac = self.eval_B_jacobian(x)
        return np.einsum("...ji,...j->...i", jac, b) / norm(b)[..., None]

    def eval_E(self, x: Vec3) -> Vec3:
        """Evaluate E(x) = -grad(phi)(x)."""
        e = self.electric(x)
        if e is not None:
            return e
        x = np.asarray(x, dtype=np.float64)
        step = fd_step(x)
        comps = []
        for j in range(3):
            dx = np.zeros_like(x)
            dx[..., j] = step[..., j]
            comps.append(-(self.potential(x + dx) - self.potential(x - dx)) / (2.0 * step[..., j]))
        return np.stack(comps, axis=-1)

    def modified_E(self, x: Vec3, mu0: float) -> Vec3:
        """
        Evaluate the modified force field E(x) - mu0 grad|B|(x).

        Args:
            x: Position
            mu0: Frozen magnetic moment (>= 0)
        """
        if mu0 < 0:
            raise ValueError("mu0 must be non-negative")
        if mu0 == 0.0:
            return self.eval_E(x)
        return self.eval_E(x) - mu0 * self.grad_abs_B(x)

    def energy(self, x: Vec3, v: Vec3) -> np.ndarray:
        """Total energy H(x, v) = |v|²/2 + phi(x)."""
        return 0.5 * np.sum(v * v, axis=-1) + self.potential(x)

    def divergence(self, x: Vec3) -> np.ndarray:
        """Trace of B1'(x); vanishes for physical fields."""
        return np.trace(self.eval_B_jacobian(x), axis1=-2, axis2=-1) * self._eps

    def describe(self) -> dict[str, object]:
        """Return the parameters that identify this model."""
        return {
            "field": self.name,
            "eps": self._eps,
            "min_strength": self._min_strength,
            "analytic_jacobian": self.has_analytic_jacobian,
        }

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(eps={self._eps})"
