import numpy as np
import pytest

E = np.e


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
