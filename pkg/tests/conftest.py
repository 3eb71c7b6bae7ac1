import numpy as np
import pytest

from forced_ep import systems

BENCH_INERTIA = (0.5, 2.0, 1.0)
OMEGA0 = np.array([1.0 / np.sqrt(2.0), 0.0, 1.0 / np.sqrt(2.0)])


@pytest.fixture
def rng():
    return np.random.default_rng(20260819)


@pytest.fixture
def llg_system():
    return systems.rigid_body_llg(systems.RigidBodyParams(BENCH_INERTIA, alpha=1.0))


@pytest.fixture
def relaxed_system():
    return systems.relaxed_rigid_body(systems.RigidBodyParams(BENCH_INERTIA, beta=0.1))


@pytest.fixture
def free_system():
    return systems.free_rigid_body(systems.RigidBodyParams(BENCH_INERTIA))


@pytest.fixture
def omega0():
    return OMEGA0.copy()
