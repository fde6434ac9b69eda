import numpy as np
import pytest

from coxperc.common.replicates import ReplicatePool
from coxperc.core import ConstantLaw, Seed, Window
from coxperc.coxsampler import MarkedPointSet
from coxperc.settings import TestingSettings


@pytest.fixture(scope="session")
def settings():
    return TestingSettings()


@pytest.fixture()
def seed():
    return Seed.of(20240611)


@pytest.fixture()
def rng(seed):
    return seed.rng()


@pytest.fixture()
def pool(settings):
    return ReplicatePool(settings.threads)


@pytest.fixture()
def unit_disks():
    return ConstantLaw(r=1.0)


@pytest.fixture()
def small_window():
    return Window(dim=2, half_width=4.0, margin=1.0)


@pytest.fixture()
def three_balls():
    """Balls at (0,0), (3,0) and (10,0) with radius 2."""
    return MarkedPointSet.from_arrays(
        np.array([[0.0, 0.0], [3.0, 0.0], [10.0, 0.0]]), [2.0, 2.0, 2.0]
    )
