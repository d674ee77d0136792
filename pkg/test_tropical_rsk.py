"""
Tests for tropical RSK, last passage percolation and the zero-temperature identities
"""
import math

import pytest

from app.api.models import Pattern, WeightMatrix
from app.services import tropical_rsk
from app.utils.errors import DomainError, UsageError

SMALL = WeightMatrix([[1, 2], [3, 4]])


def _integer_matrix(rng, n, m, low=0):
    return WeightMatrix([[rng.randint(low, 9) for _ in range(m)] for _ in range(n)])


class TestMoves:
    def test_local_move(self):
        assert tropical_rsk.tropical_local_move(SMALL, 2, 2) == WeightMatrix([[1, 2], [3, 7]])

    def test_map(self):
        assert tropical_rsk.apply_tropical(SMALL) == WeightMatrix([[2, 3], [4, 8]])

    def test_zeros(self):
        Z = WeightMatrix([[0, 0, 0], [0, 0, 0]])
        assert tropical_rsk.apply_tropical(Z) == Z

    @pytest.mark.parametrize("n,m", [(1, 3), (2, 2), (3, 2), (3, 4)])
    def test_round_trip(self, rng, n, m):
        Y = _integer_matrix(rng, n, m, low=-5)
        assert tropical_rsk.invert_tropical(tropical_rsk.apply_tropical(Y)) == Y

    def test_move_inverse(self, rng):
        Y = _integer_matrix(rng, 3, 3)
        assert tropical_rsk.tropical_local_move_inverse(tropical_rsk.tropical_local_move(Y, 3, 2), 3, 2) == Y


class TestLastPassage:
    def test_oracle_small(self):
        assert tropical_rsk.last_passage_oracle(SMALL, 2, 1) == 8
        assert tropical_rsk.last_passage_oracle(SMALL, 2, 2) == 10

    def test_output_matches_oracle(self):
        U = tropical_rsk.apply_tropical(SMALL)
        assert U[2, 2] == 8
        assert U[2, 2] + U[1, 1] == 10

    @pytest.mark.parametrize("n,m", [(2, 3), (3, 3), (3, 4)])
    def test_greene(self, rng, n, m):
        assert tropical_rsk.check_greene(_integer_matrix(rng, n, m))

    def test_guard(self):
        with pytest.raises(UsageError):
            tropical_rsk.last_passage_oracle(WeightMatrix([[0] * 8 for _ in range(7)]), 8, 1)

    @pytest.mark.parametrize("sigma", [None, 3, -2])
    def test_energy_identity(self, rng, sigma):
        assert tropical_rsk.check_tropical_energy_identity(_integer_matrix(rng, 3, 4, low=-4), sigma)


class TestGelfandTsetlin:
    def test_interlacing(self):
        assert tropical_rsk.is_gelfand_tsetlin(Pattern([[2], [3, 1]]))
        assert not tropical_rsk.is_gelfand_tsetlin(Pattern([[4], [3, 1]]))

    def test_negative_shape(self):
        assert not tropical_rsk.is_gelfand_tsetlin(Pattern([[0], [1, -1]]))

    @pytest.mark.parametrize("low", [0, -3])
    def test_membership(self, rng, low):
        assert tropical_rsk.gt_membership_check(_integer_matrix(rng, 3, 3, low=low))


class TestTropicalization:
    def test_errors_decrease(self):
        result = tropical_rsk.tropicalization_limit_check(SMALL)
        assert result['monotone']
        assert result['errors'][-1] < 1e-2

    def test_log_domain(self):
        result = tropical_rsk.tropicalization_limit_check(SMALL, (1e-3, 1e-5))
        assert result['errors'][-1] < 1e-4


class TestCauchy:
    def test_j_lambda_value(self):
        assert tropical_rsk.j_lambda([1.0, 0.0], [1, 2]).real == pytest.approx(math.exp(-1) - math.exp(-2))

    def test_j_lambda_repeated(self):
        with pytest.raises(DomainError):
            tropical_rsk.j_lambda([1.0, 0.0], [1, 1])

    def test_j_lambda_negative_x(self):
        with pytest.raises(DomainError):
            tropical_rsk.j_lambda([-1.0], [1])

    @pytest.mark.parametrize("nu,lam,expected", [
        ([1, 2], [3, 4], 1 / 600),
        ([1, 2], [1, 2], 1 / 72),
        ([0.5], [1.5], 0.5),
    ])
    def test_identity(self, nu, lam, expected):
        result = tropical_rsk.tropical_cauchy_check(nu, lam)
        assert result['passed']
        assert result['rhs'].real == pytest.approx(expected)

    def test_region(self):
        with pytest.raises(UsageError):
            tropical_rsk.tropical_cauchy_check([1], [-2])


@pytest.mark.slow
def test_laguerre_marginal():
    result = tropical_rsk.laguerre_marginal_check([1.0, 1.5], [0.5, 1.0], samples=20000, seed=3)
    assert result['passed']
