import numpy as np
import pytest

from entropic_ot import SinkhornConfig, quadratic_cost
from entropic_ot.measures import DiscreteMeasure


@pytest.fixture
def cost():
    return quadratic_cost()


@pytest.fixture
def tight():
    return SinkhornConfig(epsilon=1.0, tol=1e-12)


def random_measure(rng, size, dim=1, scale=1.0):
    pts = rng.uniform(0, scale, size=(size, dim))
    w = rng.uniform(0.1, 1.0, size=size)
    return DiscreteMeasure(pts, w / w.sum())
