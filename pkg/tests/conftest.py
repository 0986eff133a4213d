import numpy as np
import pytest

from prodmatrix import ModelConfig


@pytest.fixture
def cfg_small():
    return ModelConfig(3, 3, (1, 0), 0.7)


def rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))
