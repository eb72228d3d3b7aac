"""Pytest fixtures for the Boris integrator tests."""

import numpy as np
import pytest

from core.fields import CubicPotentialField, TokamakField, UniformField
from core.integrators import ParticleState


def pytest_addoption(parser):
    """Add the --runslow flag."""
    parser.addoption("--runslow", action="store_true", default=False, help="run slow tests")


def pytest_collection_modifyitems(config, items):
    """Skip tests marked slow unless --runslow is given."""
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    """Seeded random number generator for reproducible tests."""
    return np.random.default_rng(42)


@pytest.fixture
def tokamak():
    """Tokamak field at eps = 1."""
    return TokamakField()


@pytest.fixture
def cubic():
    """Cubic-potential field at eps = 2**-13."""
    return CubicPotentialField()


@pytest.fixture
def cubic_moderate():
    """Cubic-potential field at a moderate eps for fast runs."""
    return CubicPotentialField(eps=2.0**-6)


@pytest.fixture
def uniform():
    """Uniform field B = (0, 0, 1)."""
    return UniformField()


@pytest.fixture
def tokamak_state():
    """Banana-orbit initial data."""
    return ParticleState.from_values((1.05, 0.0, 0.0), (2.1e-3, 4.3e-4, 0.0))


@pytest.fixture
def cubic_state():
    """Initial data of the cubic-potential sweep."""
    return ParticleState.from_values((0.0, 1.0, 0.1), (0.09, 0.55, 0.3))


@pytest.fixture
def all_fields(tokamak, cubic_moderate, uniform):
    """Every built-in field with a point inside its domain."""
    return [
        (tokamak, np.array([1.05, 0.1, 0.02])),
        (cubic_moderate, np.array([0.0, 1.0, 0.1])),
        (uniform, np.array([0.3, -0.2, 0.5])),
    ]


# Hypothesis strategies for property-based testing
try:
    from hypothesis import strategies as st

    finite = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False, allow_infinity=False)

    @st.composite
    def vec3_strategy(draw, elements=finite):
        """Generate a random finite 3-vector."""
        return np.array(draw(st.lists(elements, min_size=3, max_size=3)))

    @st.composite
    def nonzero_vec3_strategy(draw, min_norm=0.1):
        """Generate a 3-vector with norm at least min_norm."""
        v = draw(vec3_strategy())
        if np.linalg.norm(v) < min_norm:
            v = v + np.array([min_norm, 0.0, 0.0]) * 2.0
        return v

    @st.composite
    def well_conditioned_mat3_strategy(draw):
        """Generate a diagonally dominant 3x3 matrix."""
        m = np.array(draw(st.lists(finite, min_size=9, max_size=9))).reshape(3, 3)
        row_sums = np.sum(np.abs(m), axis=1)
        return m + np.diag(row_sums + 1.0)

    @st.composite
    def tokamak_point_strategy(draw):
        """Generate a point near R = 1 away from the axis."""
        r = draw(st.floats(min_value=0.8, max_value=1.3))
        angle = draw(st.floats(min_value=0.0, max_value=2.0 * np.pi))
        z = draw(st.floats(min_value=-0.3, max_value=0.3))
        return np.array([r * np.cos(angle), r * np.sin(angle), z])

except ImportError:
    pass  # hypothesis not installed
