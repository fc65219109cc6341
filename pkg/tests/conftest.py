import numpy as np
import pytest

from quenchlab.model import build_grid


@pytest.fixture(scope="session")
def grid200():
    return build_grid(200)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
