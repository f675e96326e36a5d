import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from lietaylor import groups

settings.register_profile("lietaylor", deadline=None, derandomize=True, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("lietaylor")


@pytest.fixture(scope="session")
def SL2R():
    return groups.registry_get("SL2R")


@pytest.fixture(scope="session")
def SL2C():
    return groups.registry_get("SL2C")


@pytest.fixture(scope="session")
def U1():
    return groups.registry_get("U1")


@pytest.fixture(scope="session")
def Ctimes():
    return groups.registry_get("Ctimes")


H = np.array([[1, 0], [0, -1]], dtype=complex)
E = np.array([[0, 1], [0, 0]], dtype=complex)
F = np.array([[0, 0], [1, 0]], dtype=complex)
