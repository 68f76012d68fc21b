import math

import numpy as np
import pytest

from orbitlap import FiniteSet, WeightedMatrixData, WeightedVectorData

S_ELEMENT = np.array([[1.0, -1.0], [0.0, -1.0]])
X1 = np.array([[0.0, 0.0], [2.0, 0.0]])
X2 = np.eye(2)
X3 = np.array([[1.0, -1.0], [1.0, 1.0]])
X4 = np.diag([math.sqrt(3.0), -math.sqrt(3.0)])


@pytest.fixture
def finite_example():
    """One vector sample with the four-element group {+-I, +-S}."""
    data = WeightedVectorData([[2.0, 0.0]], [1.0])
    model = FiniteSet((np.eye(2), -np.eye(2), S_ELEMENT, -S_ELEMENT))
    return data, model


@pytest.fixture
def rotation_pair():
    """X = (I, [[1,-1],[1,1]]) with weights (1, 2): already of minimal norm."""
    return WeightedMatrixData([X2, X3], [1.0, 2.0])


@pytest.fixture
def quadrant():
    return {
        "unstable": WeightedMatrixData([X1], [4.0]),
        "semistable": WeightedMatrixData([X1, X2], [4.0, 1.0]),
        "polystable": WeightedMatrixData([X2], [1.0]),
        "stable": WeightedMatrixData([X2, X3, X4], [1.0, 2.0, 3.0]),
    }


def random_spd(rng, p, shift=0.5):
    a = rng.standard_normal((p, p))
    return a @ a.T + shift * np.eye(p)


ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
