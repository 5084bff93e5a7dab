import numpy as np
import pytest

from beltrami.report import Grid


@pytest.fixture
def small_grid():
    return Grid(8, 8)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
