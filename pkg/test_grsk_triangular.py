"""
Tests for geometric RSK on triangular inputs
"""
from fractions import Fraction as F

import pytest

from app.api.models import TriangularArray, WeightMatrix
from app.services import grsk_core, grsk_triangular
from app.utils.errors import DomainError, UsageError


def _generic_grid(n):
    # distinct primes so every rewritten entry is detectable
    primes = [F(p) for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)]
    return TriangularArray.from_flat(primes[:n * (n - 1) // 2], n).to_grid()


class TestWallMove:
    @pytest.mark.parametrize("n, cells", [
        (3, [(3, 2)]),
        (4, [(4, 3), (2, 1)]),
        (5, [(5, 4), (3, 2)]),
        (6, [(6, 5), (4, 3), (2, 1)]),
    ])
    def test_cells(self, n, cells):
        assert grsk_triangular.wall_move_cells(n) == cells

    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_only_listed_cells_change(self, n):
        before = _generic_grid(n)
        after = [row[:] for row in before]
        grsk_triangular._wall_move(after, n)
        changed = {(i + 1, j + 1) for i in range(n) for j in range(i) if after[i][j] != before[i][j]}
        assert changed == set(grsk_triangular.wall_move_cells(n))

    def test_three_example(self):
        x21, x31, x32 = F(2), F(3), F(5)
        out = grsk_triangular.apply_grsk_triangular(TriangularArray([[x21], [x31, x32]]))
        assert out == TriangularArray([[x21], [x21 * x31, x21 * x31 * x32]])

    def test_four_example(self):
        x21, x31, x32, x41, x42, x43 = F(2), F(3), F(5), F(7), F(11), F(13)
        out = grsk_triangular.apply_grsk_triangular(TriangularArray([[x21], [x31, x32], [x41, x42, x43]]))
        s = x32 + x41
        assert out == TriangularArray([
            [x32 * x41 / s],
            [x21 * x32 * x41 / s, x21 * x31 * x32],
            [x21 * x31 * x41, x21 * x31 * x42 * s, x21 * x31 * x42 * x43 * s],
        ])
        assert out[2, 1] == F(35, 12)


class TestTriangular:
    def test_size_two_is_identity(self):
        assert grsk_triangular.apply_grsk_triangular(TriangularArray([[F(3, 4)]])) == TriangularArray([[F(3, 4)]])

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_energy_identity(self, rational_triangular, n):
        assert grsk_triangular.check_triangular_identity(rational_triangular(n))

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_jacobian(self, rational_triangular, n):
        assert grsk_triangular.log_jacobian_det_triangular(rational_triangular(n)) in (1, -1)

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_shape_ratios(self, rational_triangular, n):
        assert grsk_triangular.check_shape_ratios(rational_triangular(n))

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_type_formula(self, rational_triangular, n):
        assert grsk_triangular.check_type_formula(rational_triangular(n))

    def test_single_wall_path(self):
        W = TriangularArray([[2], [3, 5]])
        # the only path (2,1) -> (3,2) below the diagonal
        assert grsk_triangular.below_wall_partition_oracle(W, 1) == 2 * 3 * 5

    def test_oracle_bounds(self):
        W = TriangularArray([[1], [1, 1]])
        with pytest.raises(UsageError):
            grsk_triangular.below_wall_partition_oracle(W, 2)

    def test_nonpositive(self):
        with pytest.raises(DomainError):
            grsk_triangular.apply_grsk_triangular(TriangularArray([[1], [0, 1]]))

    def test_row_lengths(self):
        with pytest.raises(UsageError):
            TriangularArray([[1, 2]])


class TestEmbedding:
    def test_embedding(self):
        W = TriangularArray([[2], [3, 5]])
        emb = grsk_triangular.triangular_symmetric_embedding(W, F(1, 10))
        assert emb == WeightMatrix([[F(1, 10), 2, 3], [2, F(1, 10), 5], [3, 5, F(1, 10)]])

    def test_two_by_two_exact(self):
        w, eps = F(3), F(1, 1000)
        out = grsk_core.apply_grsk(grsk_triangular.triangular_symmetric_embedding(TriangularArray([[w]]), eps))
        assert out == WeightMatrix([[w / 2, eps * w], [eps * w, 2 * eps ** 2 * w]])
        assert out == WeightMatrix([[F(3, 2), F(3, 1000)], [F(3, 1000), F(3, 500000)]])

    def test_collapse_scaling_indices(self):
        halves = {n: sorted(i for (i, _), f in grsk_triangular.collapse_scaling(n, 1e-3).items() if f == 0.5 and i > 1)
                  for n in (3, 4, 5, 6)}
        assert halves == {3: [2], 4: [3], 5: [2, 4], 6: [3, 5]}

    @pytest.mark.parametrize("n", [3, 4])
    def test_symmetric_limit(self, rational_triangular, n):
        result = grsk_triangular.epsilon_embedding_check(rational_triangular(n))
        assert result['shrinking']
        assert result['errors'][-1] < result['errors'][0]

    def test_eps_must_decrease(self, rational_triangular):
        with pytest.raises(UsageError):
            grsk_triangular.epsilon_embedding_check(rational_triangular(3), [1e-3, 1e-2])

    def test_wall_path_structure(self, rational_triangular):
        result = grsk_triangular.check_wall_path_structure(rational_triangular(4), 1e-8)
        assert set(result['errors']) == {'v1', 'v2', 'v3', 'v4'}
        assert result['max_error'] < 1e-3
