import os

import numpy as np
import pytest

from centralflow import FluidModel, ScalarField, StructuredGrid

FIXTURE_DIR = os.path.join(os.path.dirname(__file__), "fixtures")


@pytest.fixture
def fluid():
    return FluidModel()


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def fixture_path(name):
    return os.path.join(FIXTURE_DIR, name)


def random_saturation(grid, rng, lo=0.21, hi=0.85):
    return ScalarField(grid, lo + (hi - lo) * rng.random(grid.shape))


def small_grid(nx=8, ny=8):
    return StructuredGrid(nx, ny, 1.0, 1.0)
