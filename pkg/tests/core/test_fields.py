"""Tests for the field models."""

import math

import numpy as np
import pytest
from hypothesis import given, settings

from core.errors import ConfigurationError, FieldDomainError, ZeroField
from core.fields import (
    FIELD_MODELS,
    CubicPotentialField,
    CustomField,
    TokamakField,
    UniformField,
    build_field,
)
from tests.conftest import tokamak_point_strategy


def fd_grad_abs_B(model, x, step=1e-6):
    """Central-difference gradient of |B|."""
    grad = np.zeros(3)
    for j in range(3):
        dx = np.zeros(3)
        dx[j] = step
        grad[j] = (model.eval_abs_B(x + dx) - model.eval_abs_B(x - dx)) / (2.0 * step)
    return grad


class TestTokamak:
    """Tests for the tokamak field."""

    def test_value_at_initial_point(self, tokamak):
        """Test B at (1.05, 0, 0)."""
        b = tokamak.eval_B(np.array([1.05, 0.0, 0.0]))
        assert np.allclose(b, [0.0, 1.0 / 1.05, 0.05 / 2.1], rtol=1e-14, atol=1e-15)

    def test_axis_is_outside_domain(self, tokamak):
        """Test that R = 0 raises FieldDomainError."""
        with pytest.raises(FieldDomainError):
            tokamak.eval_B(np.array([0.0, 0.0, 0.5]))

    def test_floor_enforced_when_requested(self):
        """Test min_strength = 1 rejects the initial point where |B1| < 1."""
        assert TokamakField().min_strength == 0.0
        with pytest.raises(FieldDomainError):
            TokamakField(min_strength=1.0).eval_B(np.array([1.05, 0.0, 0.0]))

    def test_eps_scaling(self):
        """Test B = B1 / eps."""
        x = np.array([1.05, 0.1, 0.02])
        assert np.allclose(TokamakField(eps=0.01).eval_B(x), 100.0 * TokamakField().eval_B(x))

    @given(tokamak_point_strategy())
    @settings(max_examples=30)
    def test_jacobian_matches_fd(self, x):
        """Test the analytic Jacobian against finite differences."""
        model = TokamakField()
        analytic = model.eval_B_jacobian(x)
        numeric = model._fd_jacobian(x)
        assert np.allclose(analytic, numeric, rtol=1e-5, atol=1e-7)

    @given(tokamak_point_strategy())
    @settings(max_examples=30)
    def test_divergence_free(self, x):
        """Test trace B1' = 0."""
        assert abs(TokamakField().divergence(x)) < 1e-12

    def test_no_electric_field(self, tokamak):
        """Test E = 0 and phi = 0."""
        x = np.array([1.0, 0.2, 0.1])
        assert np.all(tokamak.eval_E(x) == 0.0)
        assert tokamak.potential(x) == 0.0

    def test_batched_matches_pointwise(self, tokamak):
        """Test (N, 3) evaluation against single points."""
        xs = np.array([[1.05, 0.0, 0.0], [0.9, 0.3, -0.1], [1.1, -0.2, 0.2]])
        batched = tokamak.eval_B(xs)
        for i, x in enumerate(xs):
            assert np.allclose(batched[i], tokamak.eval_B(x))


class TestCubicPotential:
    """Tests for the cubic-potential field."""

    def test_b_at_unit_eps(self):
        """Test B at (0, 1, 0.1) with eps = 1."""
        b = CubicPotentialField(eps=1.0).eval_B(np.array([0.0, 1.0, 0.1]))
        assert np.allclose(b, [0.45, 0.05, 0.5], rtol=1e-14)

    def test_electric_field(self, cubic):
        """Test E at (0, 1, 0.1)."""
        e = cubic.eval_E(np.array([0.0, 1.0, 0.1]))
        assert np.allclose(e, [0.0, -1.0, -0.004], rtol=1e-14, atol=1e-16)

    def test_electric_is_minus_grad_potential(self, cubic, rng):
        """Test E = -grad(phi) against finite differences."""
        for _ in range(20):
            x = rng.uniform(-1.0, 1.0, size=3)
            step = 1e-6
            grad = np.array(
                [
                    (cubic.potential(x + step * e) - cubic.potential(x - step * e)) / (2 * step)
                    for e in np.eye(3)
                ]
            )
            assert np.allclose(cubic.eval_E(x), -grad, rtol=1e-6, atol=1e-8)

    def test_divergence_free(self, cubic):
        """Test that the constant Jacobian is traceless."""
        assert cubic.divergence(np.array([0.3, 0.4, 0.5])) == 0.0

    def test_zero_field_point(self, cubic):
        """Test that B1 vanishes at the origin."""
        with pytest.raises(ZeroField):
            cubic.eval_B(np.zeros(3))

    def test_default_floor_admits_initial_point(self, cubic):
        """Test that |B1| ≈ 0.67 at the sweep start passes the default floor but not 1."""
        x0 = np.array([0.0, 1.0, 0.1])
        assert cubic.min_strength == 0.0
        assert float(np.linalg.norm(cubic.b1(x0))) == pytest.approx(0.5 * math.sqrt(1.82))
        with pytest.raises(FieldDomainError):
            CubicPotentialField(min_strength=1.0).eval_B(x0)


class TestUniform:
    """Tests for the uniform field."""

    def test_constant_value(self, uniform):
        """Test B = b0 / eps everywhere."""
        assert np.allclose(uniform.eval_B(np.array([5.0, -3.0, 2.0])), [0.0, 0.0, 1.0])

    def test_grad_abs_B_zero(self, uniform):
        """Test that grad|B| vanishes."""
        assert np.all(uniform.grad_abs_B(np.array([1.0, 2.0, 3.0])) == 0.0)

    def test_constant_electric_field(self):
        """Test E = e0 and phi = -e0 · x."""
        model = UniformField(e0=(0.1, 0.0, 0.0))
        x = np.array([2.0, 1.0, 0.0])
        assert np.allclose(model.eval_E(x), [0.1, 0.0, 0.0])
        assert model.potential(x) == pytest.approx(-0.2)

    def test_floor_enforced(self):
        """Test that |b0| below the floor raises FieldDomainError."""
        with pytest.raises(FieldDomainError):
            UniformField(b0=(0.0, 0.0, 0.5)).eval_B(np.zeros(3))

    def test_modified_field_unchanged(self, uniform):
        """Test that the mu0 term vanishes for a uniform field."""
        x = np.array([0.1, 0.2, 0.3])
        assert np.array_equal(uniform.modified_E(x, 0.7), uniform.eval_E(x))


class TestGradAbsB:
    """Tests for grad|B| on every built-in field."""

    def test_matches_finite_differences(self, all_fields, rng):
        """Test grad|B| against central differences at 100 random points."""
        for model, center in all_fields:
            for _ in range(100):
                x = center + rng.uniform(-0.05, 0.05, size=3)
                analytic = model.grad_abs_B(x)
                numeric = fd_grad_abs_B(model, x)
                scale = max(np.linalg.norm(analytic), 1e-12)
                assert np.linalg.norm(analytic - numeric) <= 1e-5 * scale + 1e-9

    def test_modified_e_rejects_negative_mu(self, tokamak):
        """Test that mu0 < 0 is rejected."""
        with pytest.raises(ValueError):
            tokamak.modified_E(np.array([1.05, 0.0, 0.0]), -1.0)

    def test_modified_e_zero_mu_is_exact(self, cubic):
        """Test that mu0 = 0 returns E bit for bit."""
        x = np.array([0.0, 1.0, 0.1])
        assert np.array_equal(cubic.modified_E(x, 0.0), cubic.eval_E(x))


class TestCustomField:
    """Tests for fields built from callables."""

    def test_fd_fallbacks(self):
        """Test that Jacobian and E fall back to finite differences."""
        model = CustomField(
            b1=lambda x: np.stack((x[..., 1], 2.0 + 0 * x[..., 0], x[..., 0]), axis=-1),
            potential=lambda x: 0.5 * np.sum(x * x, axis=-1),
        )
        x = np.array([0.5, 0.2, -0.1])
        assert not model.has_analytic_jacobian
        expected = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
        assert np.allclose(model.eval_B_jacobian(x), expected, atol=1e-8)
        assert np.allclose(model.eval_E(x), -x, atol=1e-8)

    def test_analytic_jacobian_flag(self):
        """Test has_analytic_jacobian when a Jacobian is supplied."""
        model = CustomField(
            b1=lambda x: np.broadcast_to([0.0, 0.0, 1.0], np.shape(x)).copy(),
            b1_jacobian=lambda x: np.zeros((3, 3)),
        )
        assert model.has_analytic_jacobian
        assert np.all(model.eval_E(np.ones(3)) == 0.0)


class TestRegistry:
    """Tests for the field registry."""

    def test_names(self):
        """Test the registered names."""
        assert set(FIELD_MODELS) == {"tokamak", "cubic-potential", "uniform"}

    def test_build_with_params(self):
        """Test building with constructor parameters."""
        model = build_field("cubic-potential", eps=2.0**-10)
        assert isinstance(model, CubicPotentialField)
        assert model.eps == 2.0**-10

    def test_unknown_field(self):
        """Test that unknown names list the available fields."""
        with pytest.raises(ConfigurationError, match="Available fields: cubic-potential, tokamak, uniform"):
            build_field("dipole")

    def test_invalid_params(self):
        """Test that bad parameters raise ConfigurationError."""
        with pytest.raises(ConfigurationError):
            build_field("tokamak", eps=-1.0)
        with pytest.raises(ConfigurationError):
            build_field("tokamak", colour="red")

    def test_with_eps_copies(self, tokamak):
        """Test that with_eps leaves the original untouched."""
        scaled = tokamak.with_eps(0.5)
        assert scaled.eps == 0.5
        assert tokamak.eps == 1.0
        assert isinstance(scaled, TokamakField)
