import numpy as np
import pytest

from sievelogic import BooleanContext, QuantumState, SubalgebraPoset, decompose

RT2 = 2.0 ** 0.5


@pytest.fixture(scope="session")
def spin1_sx():
    return decompose(np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=float) / RT2)


@pytest.fixture(scope="session")
def spin1_sz():
    return decompose(np.diag([1.0, 0.0, -1.0]) / RT2)


@pytest.fixture(scope="session")
def spin1_sx2(spin1_sx):
    from sievelogic import apply_function

    return apply_function(spin1_sx, lambda x: x * x)


@pytest.fixture(scope="session")
def spin1_psi():
    return QuantumState.vector([0.0, 1.0, 0.0])


@pytest.fixture(scope="session")
def spinh_sz():
    return decompose(np.diag([0.5, -0.5]))


@pytest.fixture(scope="session")
def spinh_sx():
    return decompose(np.array([[0.0, 0.5], [0.5, 0.0]]))


@pytest.fixture(scope="session")
def spinh_psi():
    return QuantumState.vector([1.0, 1.0])


@pytest.fixture(scope="session")
def diag_context_4():
    return BooleanContext([np.diag([1.0 if i == j else 0.0 for i in range(4)]) for j in range(4)])


@pytest.fixture(scope="session")
def poset4(diag_context_4):
    return SubalgebraPoset(diag_context_4)


@pytest.fixture(scope="session")
def ks18():
    from sievelogic.cli import load_context_family

    return load_context_family("ks18_dim4")
