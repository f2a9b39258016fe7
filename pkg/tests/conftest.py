import numpy as np
import pytest

from abcpt import ToyModel
from abcpt.rng import RngStream


@pytest.fixture
def toy_model():
    return ToyModel()


@pytest.fixture
def stream():
    return RngStream(np.random.default_rng(12345))


def fresh_stream(seed=0):
    return RngStream(np.random.default_rng(seed))
