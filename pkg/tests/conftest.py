import pytest

from quarterplane.core import Wavenumber
from quarterplane.oracle import HankelSource
from quarterplane.solver import build_sectional


@pytest.fixture(scope="session")
def wn():
    return Wavenumber(1.0, 0.2)


@pytest.fixture(scope="session")
def src(wn):
    return HankelSource(1.0, 1.0, wn)


@pytest.fixture(scope="session")
def field(src):
    return build_sectional(src.boundary_data(), src.wavenumber)


@pytest.fixture(scope="session")
def krep(field):
    return field.k_representation()
