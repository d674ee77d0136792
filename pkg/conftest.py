import random
from fractions import Fraction

import numpy as np
import pytest

from app.api.models import SymmetricWeightMatrix, TriangularArray, WeightMatrix


def _rational(rng: random.Random, limit: int = 9) -> Fraction:
    return Fraction(rng.randint(1, limit), rng.randint(1, limit))


@pytest.fixture
def rng():
    return random.Random(7)


@pytest.fixture
def np_rng():
    return np.random.default_rng(7)


@pytest.fixture
def rational_matrix(rng):
    """Factory for random positive rational n x m matrices"""
    def make(n: int, m: int) -> WeightMatrix:
        return WeightMatrix([[_rational(rng) for _ in range(m)] for _ in range(n)])
    return make


@pytest.fixture
def rational_symmetric(rng):
    def make(n: int) -> SymmetricWeightMatrix:
        return SymmetricWeightMatrix(n, [_rational(rng) for _ in range(n * (n + 1) // 2)])
    return make


@pytest.fixture
def rational_triangular(rng):
    def make(n: int) -> TriangularArray:
        return TriangularArray([[_rational(rng) for _ in range(i)] for i in range(1, n)])
    return make


@pytest.fixture
def F():
    return Fraction
