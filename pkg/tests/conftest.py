"""Shared fixtures: coupling constants, grids and seeded generators."""

import numpy as np
import pytest

from src.solitons import SolitonSpec, SystemParams
from src.spectral import make_grid


@pytest.fixture
def params():
    return SystemParams(alpha=1.0, beta=0.0)


@pytest.fixture(scope="session")
def grid():
    """Resolves every soliton used in the fast tests to spectral accuracy."""
    return make_grid(512, 60.0)


@pytest.fixture(scope="session")
def fine_grid():
    return make_grid(2048, 100.0)


@pytest.fixture
def moving():
    return SolitonSpec(omega=0.5, c=0.5)


@pytest.fixture
def standing():
    return SolitonSpec(omega=0.0, c=0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
