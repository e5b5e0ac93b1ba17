import numpy as np
import pytest

from bifraclab.grid import ExponentConfig, Field, make_grid

BALANCED = ExponentConfig.make_balanced(1, 1, 2.0, 4.0)


@pytest.fixture
def balanced_config():
    return BALANCED


@pytest.fixture
def unit_grid_4():
    """4x4 grid of unit cells on [-2, 2]^2."""
    return make_grid(2.0, 4)


@pytest.fixture
def grid_16():
    return make_grid(2.0, 16)


def constant_field(grid, c=1.0):
    return Field(grid, np.full(grid.shape, float(c)), nonnegative=c >= 0.0)
