import numpy as np
import pytest

from solitonlab.grid import SpatialGrid
from solitonlab.soliton import SolitonContext


@pytest.fixture(scope="session")
def grid():
    return SpatialGrid(L=30.0, N=512)


@pytest.fixture(scope="session")
def ctx(grid):
    return SolitonContext(grid=grid, c_star=1.0, weight_a=0.15)


@pytest.fixture(scope="session")
def ctx3():
    return SolitonContext(
        grid=SpatialGrid(L=30.0, N=512), c_star=3.0, weight_a=0.5
    )


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)


@pytest.fixture()
def smooth_v(ctx, rng):
    """A small, localized, smooth perturbation field."""
    x = ctx.grid.x
    return 0.05 * np.exp(-0.25 * x**2) * np.sin(1.3 * x)
