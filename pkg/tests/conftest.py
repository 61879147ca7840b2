import numpy as np
import pytest

from knotbeta.knot import circle_knot, ellipse_knot, resample_arclength, torus_knot
from knotbeta.selfcheck import asymmetric_trefoil


@pytest.fixture(scope="session")
def circle():
    return resample_arclength(circle_knot(1.0), 256)


@pytest.fixture(scope="session")
def ellipse():
    return resample_arclength(ellipse_knot(1.3, 0.8), 256)


@pytest.fixture(scope="session")
def trefoil_knot():
    return torus_knot(2, 3, 2.0, 0.5)


@pytest.fixture(scope="session")
def torus(trefoil_knot):
    return resample_arclength(trefoil_knot, 256)


@pytest.fixture(scope="session")
def torus96(trefoil_knot):
    return resample_arclength(trefoil_knot, 96)


@pytest.fixture(scope="session")
def asym():
    return resample_arclength(asymmetric_trefoil(), 256)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
