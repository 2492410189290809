import pytest

from starqec.codes import builtin_ssd, builtin_surface17
from starqec.engine import Simulator


@pytest.fixture(scope="session")
def ssd_code():
    return builtin_ssd()


@pytest.fixture(scope="session")
def s17_code():
    return builtin_surface17()


@pytest.fixture(scope="session")
def ssd_sim():
    return Simulator.for_builtin("ssd")


@pytest.fixture(scope="session")
def s17_sim():
    return Simulator.for_builtin("surface17")
