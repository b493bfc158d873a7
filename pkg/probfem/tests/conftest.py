# probfem/tests/conftest.py
import numpy as np
import pytest

from probfem.experiments.pullout import PulloutProblem
from probfem.tests.helpers import unit_square_mesh


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture
def square_mesh():
    return unit_square_mesh(4)


@pytest.fixture
def pullout_coarse():
    """Single-element pullout bar."""
    return PulloutProblem(h=1.0)


@pytest.fixture
def pullout_fine():
    return PulloutProblem(h=1 / 16)
