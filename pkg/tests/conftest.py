import numpy as np
import pytest

from rqss.lattice import LatticeGeometry


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=[1, 2])
def small_geometry(request):
    return LatticeGeometry(request.param)
