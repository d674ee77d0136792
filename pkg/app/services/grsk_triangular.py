"""
Triangular geometric RSK: polymers confined strictly below the diagonal.

T_n is built recursively. Row n is inserted by the moves rho^n_j for
j <= n - 2, which never leave the strictly-lower region, followed by a
"wall move" on the entries (i, i - 1) next to the diagonal.
"""
import logging
from fractions import Fraction
from typing import Any, Dict, List, Sequence, Tuple

from app.api.models import TriangularArray, WeightMatrix
from app.services.grsk_core import apply_grsk, log_jacobian_flat, move_in_place, path_partition_oracle
from app.utils.errors import UsageError
from app.utils.exact_numerics import relative_error, to_float
from app.utils.lattice_paths import PathEnumerator

logger = logging.getLogger(__name__)

WALL_ORACLE_MAX_N = 10


def wall_move_cells(n: int) -> List[Tuple[int, int]]:
    """Entries (i, i-1) rewritten by the wall move at size n, bottom row first"""
    return [(n - 2 * k, n - 2 * k - 1) for k in range(n // 2)]


def _wall_move(x: List[List[Any]], n: int) -> None:
    # reciprocal of x_{n,n-1}, then b on every other entry next to the diagonal
    x[n - 1][n - 2] = 1 / x[n - 1][n - 2]
    for i, j in wall_move_cells(n):
        below = x[i][j - 1] if i < n else 1      # x_{i+1,i-1}, with x_{n+1,n-1} = 1
        left = x[i - 1][j - 2] if j >= 2 else 1  # x_{i,i-2}, with x_{i,0} = 1
        x[i - 1][j - 1] = below * left / x[i - 1][j - 1]


def apply_grsk_triangular(X: TriangularArray) -> TriangularArray:
    X.validate_positive()
    x = X.to_grid()
    for n in range(3, X.n + 1):
        for j in range(1, n - 1):
            for k in range(j):
                move_in_place(x, n - k, j - k)
        _wall_move(x, n)
    return TriangularArray.from_grid(x)


def energy_triangular(X: TriangularArray) -> Any:
    total = 1 / X[2, 1]
    for i, j in X.indices():
        nbrs = ([X[i - 1, j]] if j < i - 1 else []) + ([X[i, j - 1]] if j > 1 else [])
        for v in nbrs:
            total = total + v / X[i, j]
    return total


def check_triangular_identity(W: TriangularArray) -> bool:
    total = 0
    for c in W.indices():
        total = total + 1 / W[c]
    return energy_triangular(apply_grsk_triangular(W)) == total


def log_jacobian_det_triangular(W: TriangularArray) -> Fraction:
    return log_jacobian_flat(W.flat(), lambda d: apply_grsk_triangular(TriangularArray.from_flat(d, W.n)).flat())


def below_wall_partition_oracle(W: TriangularArray, r: int) -> Any:
    """z_r: r non-intersecting paths (q+1, q) -> (n-q+1, n-q) staying in j < i"""
    n = W.n
    if n > WALL_ORACLE_MAX_N:
        raise UsageError(f"Path enumeration refused for n={n} > {WALL_ORACLE_MAX_N}")
    if not 1 <= r <= n // 2:
        raise UsageError(f"r must lie in 1..{n // 2}")
    enumerator = PathEnumerator(allowed=lambda i, j: j < i)
    pairs = [((q + 1, q), (n - q + 1, n - q)) for q in range(1, r + 1)]
    total = 0
    for cells in enumerator.non_intersecting(pairs):
        weight = 1
        for c in cells:
            weight = weight * W[c]
        total = total + weight
    return total


def check_shape_ratios(W: TriangularArray) -> bool:
    """(t_{n,n-1}, t_{n-2,n-3}, ...) = (z_1, z_2/z_1, ...)"""
    T = apply_grsk_triangular(W)
    n = W.n
    prev = 1
    for k in range(1, n // 2 + 1):
        z = below_wall_partition_oracle(W, k)
        i = n - 2 * (k - 1)
        if T[i, i - 1] != z / prev:
            logger.debug(f"Shape ratio mismatch at k={k}")
            return False
        prev = z
    return True


def triangular_type(X: TriangularArray) -> List[Any]:
    """tau_j = D_nj / D_{n,j-1}, D_nj = x_nj x_{n-1,j-1} ... x_{n-j+1,1}"""
    n = X.n
    types = []
    prev = 1
    for j in range(1, n):
        d = 1
        for k in range(j):
            d = d * X[n - k, j - k]
        types.append(d / prev)
        prev = d
    return types


def check_type_formula(W: TriangularArray) -> bool:
    n = W.n
    expected = []
    for j in range(1, n):
        value = 1
        for l in range(1, j):
            value = value * W[j, l]
        for k in range(j + 1, n + 1):
            value = value * W[k, j]
        expected.append(value)
    return triangular_type(apply_grsk_triangular(W)) == expected


# ---------------------------------------------------------------------------
# embedding into the symmetric map

def triangular_symmetric_embedding(W: TriangularArray, eps: Any) -> WeightMatrix:
    """Symmetric W^eps: diagonal eps, off-diagonal entries from W"""
    n = W.n
    return WeightMatrix([[eps if i == j else W[max(i, j), min(i, j)] for j in range(1, n + 1)]
                         for i in range(1, n + 1)])


def diamond(T: TriangularArray) -> WeightMatrix:
    """Symmetric extension of T whose diagonal copies the entries next to it"""
    n = T.n
    diag = {}
    for i, j in wall_move_cells(n):
        diag[i] = diag[j] = T[i, j]
    if n % 2 == 1:
        diag[1] = 1
    return WeightMatrix([[diag[i] if i == j else T[max(i, j), min(i, j)] for j in range(1, n + 1)]
                         for i in range(1, n + 1)])


def collapse_scaling(n: int, eps: float) -> Dict[Tuple[int, int], float]:
    """Diagonal factors of Lambda^eps; off-diagonal entries are scaled by eps"""
    factors = {}
    for i in range(n // 2):
        factors[n - 2 * i, n - 2 * i] = 2 * eps ** 2
    for i in range(1, (n - 1) // 2 + 1):
        factors[n - 2 * i + 1, n - 2 * i + 1] = 0.5
    factors[1, 1] = 0.5 if n % 2 == 0 else eps
    return factors


def collapse_to_symmetric(T: TriangularArray, eps: float) -> WeightMatrix:
    """Lambda^eps applied to the diamond extension of T"""
    n = T.n
    D = diamond(T)
    factors = collapse_scaling(n, eps)
    return WeightMatrix([[to_float(D[i, j]) * (factors[i, i] if i == j else eps) for j in range(1, n + 1)]
                         for i in range(1, n + 1)])


def epsilon_embedding_check(W: TriangularArray, eps_list: Sequence[float] = (1e-8, 1e-9, 1e-10)) -> Dict[str, Any]:
    """Compare T(W^eps) with Lambda^eps(diamond(T_tri(W))) entrywise as eps shrinks"""
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise UsageError("eps_list must be strictly decreasing")
    Wf = TriangularArray([[to_float(v) for v in row] for row in W.rows])
    leading = apply_grsk_triangular(Wf)

    errors = []
    for eps in eps_list:
        exact = apply_grsk(triangular_symmetric_embedding(Wf, eps))
        approx = collapse_to_symmetric(leading, eps)
        err = max(relative_error(exact[i, j], approx[i, j]) for i in range(1, W.n + 1) for j in range(1, W.n + 1))
        errors.append(err)
        logger.debug(f"eps={eps:g} max relative error {err:.3e}")

    floor = 1e-12
    shrinking = all(b < a or b < floor for a, b in zip(errors, errors[1:]))
    superlinear = all(
        b < floor or b <= 1.5 * (e2 / e1) * a
        for (a, b), (e1, e2) in zip(zip(errors, errors[1:]), zip(eps_list, eps_list[1:]))
    )
    return {
        'eps': list(eps_list),
        'errors': errors,
        'shrinking': shrinking,
        'superlinear': superlinear,
        'passed': shrinking and superlinear,
    }


def check_wall_path_structure(W: TriangularArray, eps: float) -> Dict[str, Any]:
    """Full-square sums v_r of W^eps against eps^(2k) z_k^2 (r = 2k) and 2 eps^(2k) z_{k-1} z_k (r = 2k-1)"""
    n = W.n
    Wf = TriangularArray([[to_float(v) for v in row] for row in W.rows])
    W_eps = triangular_symmetric_embedding(Wf, eps)
    z = [1.0] + [below_wall_partition_oracle(Wf, k) for k in range(1, n // 2 + 1)]

    errors = {}
    for k in range(1, n // 2 + 1):
        errors[f"v{2 * k - 1}"] = relative_error(2 * eps ** (2 * k) * z[k - 1] * z[k],
                                                 path_partition_oracle(W_eps, n, 2 * k - 1))
        errors[f"v{2 * k}"] = relative_error(eps ** (2 * k) * z[k] ** 2, path_partition_oracle(W_eps, n, 2 * k))
    return {'eps': eps, 'errors': errors, 'max_error': max(errors.values())}
