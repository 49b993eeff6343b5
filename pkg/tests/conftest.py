import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fractions import Fraction

from latfree import IDENTITY, QuadraticModel, UniMatrix, UnimodularSet


@pytest.fixture
def figure_model() -> QuadraticModel:
    """f(x1, x2) = 3 x1^2 + x2^2 + x1 + x2."""
    return QuadraticModel([[6, 0], [0, 2]], [1, 1])


@pytest.fixture
def figure_start() -> UnimodularSet:
    """The sheared start set {(0,1), (1,1), (1,2), (2,2)}."""
    return UnimodularSet((0, 1), UniMatrix((1, 0), (1, 1)))


@pytest.fixture
def corner_model() -> QuadraticModel:
    """f(x1, x2) = (x1 - 5/2)^2 + (x2 - 1/2)^2, constant included."""
    return QuadraticModel([[2, 0], [0, 2]], [-5, -1],
                          constant=Fraction(25, 4) + Fraction(1, 4))


@pytest.fixture
def unit_square() -> UnimodularSet:
    return UnimodularSet((0, 0), IDENTITY)
