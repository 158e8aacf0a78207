"""
Shared fixtures for the gaussloop test suite.
"""

import os
import sys

import pytest

# Ajouter le dossier src au PYTHONPATH
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from gaussloop.cli.generators import generate_model  # noqa: E402
from gaussloop.core import Schedule  # noqa: E402
from gaussloop.model import build  # noqa: E402


def cycle(n: int, J: float = 0.3, mu: float = 1.0, s: float = 1.0):
    return build([(i, mu, s) for i in range(n)], [(i, (i + 1) % n, J) for i in range(n)])


def random_dominant(n: int, seed: int, coupling: float = 0.5):
    return generate_model("random_dominant", n, coupling, seed)


def random_tree(n: int, seed: int, coupling: float = 0.5):
    return generate_model("tree", n, coupling, seed)


@pytest.fixture
def tight():
    """Schedule converging well below the assertion tolerances."""
    return Schedule(tol=1e-13, max_iters=20000)


@pytest.fixture
def cycle4():
    """4-cycle, s = 1, mu = 1, J = 0.3 (exact mean 2.5, variance 1.28125)."""
    return cycle(4)


@pytest.fixture
def triangle():
    return cycle(3, J=0.2)


@pytest.fixture
def pair():
    """Two nodes, mu = (1, 0), J = 0.5: means (4/3, 2/3), variances 4/3."""
    return build([(0, 1.0, 1.0), (1, 0.0, 1.0)], [(0, 1, 0.5)])


@pytest.fixture
def star():
    return build([(0, 0.5, 1.0), (1, 1.0, 0.8), (2, -0.5, 1.2), (3, 0.2, 0.9)],
                 [(0, 1, 0.3), (0, 2, -0.25), (0, 3, 0.2)])


@pytest.fixture
def grid3():
    return generate_model("grid", 3, 0.2, 0)
