"""
Tests for geometric RSK on symmetric inputs
"""
from fractions import Fraction as F

import pytest

from app.api.models import SymmetricWeightMatrix
from app.services import grsk_symmetric
from app.utils.errors import UsageError


class TestSymmetric:
    def test_two_by_two_formula(self):
        a, b, d = F(2), F(3), F(5)
        out = grsk_symmetric.apply_grsk_symmetric(SymmetricWeightMatrix(2, [a, b, d]))
        assert out.upper == (b / 2, a * b, 2 * a * b * d)

    def test_ones(self):
        out = grsk_symmetric.apply_grsk_symmetric(SymmetricWeightMatrix(2, [1, 1, 1]))
        assert out.upper == (F(1, 2), 1, 2)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_recursion_matches_full_map(self, rational_symmetric, n):
        W = rational_symmetric(n)
        assert grsk_symmetric.apply_grsk_symmetric_recursive(W) == grsk_symmetric.apply_grsk_symmetric(W)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_diagonal_products(self, rational_symmetric, n):
        assert grsk_symmetric.diagonal_product_identity(rational_symmetric(n))

    def test_diagonal_products_on_ones(self):
        assert grsk_symmetric.diagonal_product_identity(SymmetricWeightMatrix(2, [1, 1, 1]))

    @pytest.mark.parametrize("n", [2, 3])
    def test_patterns_coincide(self, rational_symmetric, n):
        assert grsk_symmetric.check_symmetric_patterns(rational_symmetric(n))

    @pytest.mark.parametrize("n", [2, 3])
    def test_jacobian(self, rational_symmetric, n):
        assert grsk_symmetric.log_jacobian_det_symmetric(rational_symmetric(n)) in (1, -1)

    def test_recursion_step_length(self):
        with pytest.raises(UsageError):
            grsk_symmetric.symmetric_recursion_step(SymmetricWeightMatrix(1, [1]), [1, 2], 1)

    def test_storage(self):
        W = SymmetricWeightMatrix(3, [1, 2, 3, 4, 5, 6])
        assert W[3, 1] == W[1, 3] == 3
        assert W[2, 3] == 5
        assert SymmetricWeightMatrix.from_full(W.to_full()) == W
