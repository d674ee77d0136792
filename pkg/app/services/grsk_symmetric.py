"""
Geometric RSK restricted to symmetric matrices
"""
import logging
from fractions import Fraction
from typing import Any, Sequence

from app.api.models import SymmetricWeightMatrix, WeightMatrix
from app.services.grsk_core import apply_grsk, patterns_from_matrix, row_insert_step, log_jacobian_flat
from app.utils.errors import UsageError, VerificationFailure

logger = logging.getLogger(__name__)


def apply_grsk_symmetric(W: SymmetricWeightMatrix) -> SymmetricWeightMatrix:
    T = apply_grsk(W.to_full())
    if not T.is_symmetric():
        raise VerificationFailure("gRSK of a symmetric matrix returned an asymmetric output")
    return SymmetricWeightMatrix.from_full(T)


def symmetric_recursion_step(prev: SymmetricWeightMatrix, new_col: Sequence[Any], w_nn: Any) -> SymmetricWeightMatrix:
    """Output for size n from the output for size n - 1, the new column and the new diagonal weight"""
    n = prev.n + 1
    if len(new_col) != n - 1:
        raise UsageError(f"New column must have {n - 1} entries, got {len(new_col)}")

    stacked = WeightMatrix(prev.to_full().to_lists() + [list(new_col)])
    S = row_insert_step(stacked, n).transpose()  # (n-1) x n

    t = {}
    for i in range(1, n):
        for j in range(i + 1, n + 1):
            t[i, j] = S[i, j]
    t[1, 1] = S[1, 2] / (2 * S[1, 1])
    for i in range(2, n):
        t[i, i] = S[i, i + 1] * S[i - 1, i] / S[i, i]
    t[n, n] = 2 * S[n - 1, n] * w_nn
    return SymmetricWeightMatrix(n, [t[i, j] for i in range(1, n + 1) for j in range(i, n + 1)])


def apply_grsk_symmetric_recursive(W: SymmetricWeightMatrix) -> SymmetricWeightMatrix:
    """Same map as ``apply_grsk_symmetric``, built one size at a time"""
    out = SymmetricWeightMatrix(1, [W[1, 1]])
    for n in range(2, W.n + 1):
        out = symmetric_recursion_step(out, [W[i, n] for i in range(1, n)], W[n, n])
    return out


def diagonal_product_identity(W: SymmetricWeightMatrix) -> bool:
    """4^(n//2) prod w_ii = t_nn / t_{n-1,n-1} * ... = prod_{i odd} z_ni / prod_{i even} z_ni"""
    n = W.n
    T = apply_grsk(W.to_full())

    lhs = Fraction(4) ** (n // 2)
    for i in range(1, n + 1):
        lhs = lhs * W[i, i]

    alternating = 1
    for k in range(n):
        t = T[n - k, n - k]
        alternating = alternating * t if k % 2 == 0 else alternating / t

    shape = patterns_from_matrix(T).P.shape
    by_shape = 1
    for i, z in enumerate(shape, start=1):
        by_shape = by_shape * z if i % 2 == 1 else by_shape / z

    return lhs == alternating == by_shape


def check_symmetric_patterns(W: SymmetricWeightMatrix) -> bool:
    pair = patterns_from_matrix(apply_grsk(W.to_full()))
    return pair.P == pair.Q


def log_jacobian_det_symmetric(W: SymmetricWeightMatrix) -> Fraction:
    """Log-Jacobian on the n(n+1)/2 upper-triangle coordinates"""
    return log_jacobian_flat(W.flat(), lambda d: apply_grsk_symmetric(SymmetricWeightMatrix(W.n, d)).flat())
