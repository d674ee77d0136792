"""
Geometric RSK on positive n x m matrices.

The map T is a fixed composition of local moves l_ij; everything here is a
pure function of WeightMatrix/Pattern values and works over any scalar type
from ``app.utils.exact_numerics`` (and numpy arrays for batched floats).
Indices in the public API are 1-based.
"""
import logging
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, List, Optional, Sequence, Tuple, Union

from app.api.models import Pattern, PatternPair, WeightMatrix
from app.utils.errors import UsageError, VerificationFailure
from app.utils.exact_numerics import dual_seed, is_positive, log_jacobian_from_duals
from app.utils.lattice_paths import PathEnumerator

logger = logging.getLogger(__name__)

Grid = List[List[Any]]
PATH_ORACLE_MAX_SIZE = 14


# ---------------------------------------------------------------------------
# local moves

def _interior_block(a, b, c, d):
    s = b + c
    return b * c / (a * s), d * s


def _interior_block_inverse(a, b, c, d):
    s = b + c
    return b * c / (a * s), d / s


def move_in_place(x: Grid, i: int, j: int) -> None:
    """l_ij on a row-major grid, addressed with 1-based (i, j)"""
    if i >= 2 and j >= 2:
        x[i - 2][j - 2], x[i - 1][j - 1] = _interior_block(
            x[i - 2][j - 2], x[i - 2][j - 1], x[i - 1][j - 2], x[i - 1][j - 1])
    elif i == 1 and j >= 2:
        x[0][j - 1] = x[0][j - 2] * x[0][j - 1]
    elif j == 1 and i >= 2:
        x[i - 1][0] = x[i - 2][0] * x[i - 1][0]


def move_inverse_in_place(x: Grid, i: int, j: int) -> None:
    if i >= 2 and j >= 2:
        x[i - 2][j - 2], x[i - 1][j - 1] = _interior_block_inverse(
            x[i - 2][j - 2], x[i - 2][j - 1], x[i - 1][j - 2], x[i - 1][j - 1])
    elif i == 1 and j >= 2:
        x[0][j - 1] = x[0][j - 1] / x[0][j - 2]
    elif j == 1 and i >= 2:
        x[i - 1][0] = x[i - 1][0] / x[i - 2][0]


def _check_index(X: WeightMatrix, i: int, j: int) -> None:
    if not (1 <= i <= X.n and 1 <= j <= X.m):
        raise UsageError(f"Index ({i},{j}) outside {X.n}x{X.m} matrix")


def local_move(X: WeightMatrix, i: int, j: int) -> WeightMatrix:
    _check_index(X, i, j)
    X.validate_positive()
    x = X.to_lists()
    move_in_place(x, i, j)
    return WeightMatrix(x)


def local_move_inverse(X: WeightMatrix, i: int, j: int) -> WeightMatrix:
    _check_index(X, i, j)
    X.validate_positive()
    x = X.to_lists()
    move_inverse_in_place(x, i, j)
    return WeightMatrix(x)


# ---------------------------------------------------------------------------
# the map T

@lru_cache(maxsize=None)
def row_moves(i: int, m: int) -> Tuple[Tuple[int, int], ...]:
    """Local moves of R_i in application order: pi_i^m, then pi_{i-1}^{m-1}, ..."""
    moves = []
    k = 0
    while i - k >= 1 and m - k >= 1:
        row = i - k
        moves.extend((row, col) for col in range(1, m - k + 1))
        k += 1
    return tuple(moves)


@lru_cache(maxsize=None)
def grsk_moves(n: int, m: int) -> Tuple[Tuple[int, int], ...]:
    return tuple(move for i in range(1, n + 1) for move in row_moves(i, m))


def row_insert_step(X: WeightMatrix, i: int) -> WeightMatrix:
    """Apply R_i alone"""
    if not 1 <= i <= X.n:
        raise UsageError(f"Row {i} outside 1..{X.n}")
    x = X.to_lists()
    for move in row_moves(i, X.m):
        move_in_place(x, *move)
    return WeightMatrix(x)


def apply_grsk(W: WeightMatrix) -> WeightMatrix:
    W.validate_positive()
    x = W.to_lists()
    for move in grsk_moves(W.n, W.m):
        move_in_place(x, *move)
    return WeightMatrix(x)


def invert_grsk(T: WeightMatrix) -> WeightMatrix:
    T.validate_positive()
    x = T.to_lists()
    for move in reversed(grsk_moves(T.n, T.m)):
        move_inverse_in_place(x, *move)
    W = WeightMatrix(x)
    if not all(is_positive(v) for v in W.flat()):
        raise VerificationFailure("Inverse produced a nonpositive entry; input was not in the image of T")
    return W


def rho_map(X: WeightMatrix, i: int, j: int) -> WeightMatrix:
    """rho^i_j: l_ij first, then down the diagonal to row 1 or column 1"""
    _check_index(X, i, j)
    x = X.to_lists()
    k = 0
    while i - k >= 1 and j - k >= 1:
        move_in_place(x, i - k, j - k)
        k += 1
    return WeightMatrix(x)


# ---------------------------------------------------------------------------
# patterns

def noumi_yamada_insert(state: Optional[Pattern], row: Sequence[Any]) -> Pattern:
    """Insert one row of weights into the P pattern built from the rows so far"""
    m = len(row)
    if m == 0:
        raise UsageError("Cannot insert an empty row")
    if state is not None and state.height != m:
        raise UsageError(f"Row of length {m} does not fit a pattern of height {state.height}")
    prev_width = 0 if state is None else state.width
    width = min(prev_width + 1, m)

    a = {(k, 1): row[k - 1] for k in range(1, m + 1)}
    new = {}
    for l in range(1, width + 1):
        if l <= prev_width:
            new[l, l] = a[l, l] * state[l, l]
            for k in range(l + 1, m + 1):
                new[k, l] = a[k, l] * (state[k, l] + new[k - 1, l])
            for k in range(l, m):
                a[k + 1, l + 1] = a[k + 1, l] * state[k + 1, l] * new[k, l] / (new[k + 1, l] * state[k, l])
        else:
            # first insertion reaching column l: running products of a_{., l}
            acc = None
            for k in range(l, m + 1):
                acc = a[k, l] if acc is None else acc * a[k, l]
                new[k, l] = acc

    return Pattern([[new[k, l] for l in range(1, min(k, width) + 1)] for k in range(1, m + 1)], width=width)


def noumi_yamada_patterns(W: WeightMatrix) -> PatternPair:
    """P by successive insertion, Q from the successive shapes"""
    W.validate_positive()
    state = None
    shapes = []
    for row in W.entries:
        state = noumi_yamada_insert(state, row)
        shapes.append(list(state.shape))
    return PatternPair(state, Pattern(shapes, width=W.p))


def patterns_from_matrix(T: WeightMatrix) -> PatternPair:
    n, m = T.n, T.m
    P = Pattern([[T[n - l + 1, k - l + 1] for l in range(1, min(k, n) + 1)] for k in range(1, m + 1)],
                width=min(n, m))
    Q = Pattern([[T[s - l + 1, m - l + 1] for l in range(1, min(s, m) + 1)] for s in range(1, n + 1)],
                width=min(n, m))
    if P.shape != Q.shape:
        raise VerificationFailure("P and Q patterns disagree on the shape")
    return PatternPair(P, Q)


def matrix_from_patterns(P: Pattern, Q: Pattern) -> WeightMatrix:
    """Inverse of ``patterns_from_matrix``: P fills j - i <= m - n, Q the rest"""
    n, m = Q.height, P.height
    if P.width != min(n, m) or Q.width != min(n, m):
        raise UsageError("Pattern widths do not match an n x m matrix")
    if P.shape != Q.shape:
        raise UsageError("P and Q must share their bottom row")
    rows = []
    for i in range(1, n + 1):
        row = []
        for j in range(1, m + 1):
            if j - i <= m - n:
                row.append(P[j + n - i, n - i + 1])
            else:
                row.append(Q[i + m - j, m - j + 1])
        rows.append(row)
    return WeightMatrix(rows)


def shape(W: WeightMatrix) -> List[Any]:
    T = apply_grsk(W)
    return [T[T.n - k, T.m - k] for k in range(T.p)]


def pattern_type(P: Pattern) -> List[Any]:
    types = []
    prev = None
    for i in range(1, P.height + 1):
        rho = _product(P[i, j] for j in range(1, min(i, P.width) + 1))
        types.append(rho if prev is None else rho / prev)
        prev = rho
    return types


def pattern_type_weight(P: Pattern, alpha: Sequence[Any]) -> Any:
    """P^alpha = prod tau_i^alpha_i"""
    tau = pattern_type(P)
    if len(alpha) != len(tau):
        raise UsageError(f"Exponent vector needs {len(tau)} entries")
    result = 1
    for t, a in zip(tau, alpha):
        result = result * t ** a
    return result


def check_pq(W: WeightMatrix, nu: Sequence[int], lam: Sequence[int]) -> bool:
    """type Q = row products, type P = column products, hence the P^-lam Q^-nu identity"""
    if len(nu) != W.n or len(lam) != W.m:
        raise UsageError("nu must have n entries and lam m entries")
    pair = patterns_from_matrix(apply_grsk(W))
    rows = [_product(W[i, j] for j in range(1, W.m + 1)) for i in range(1, W.n + 1)]
    cols = [_product(W[i, j] for i in range(1, W.n + 1)) for j in range(1, W.m + 1)]
    if pattern_type(pair.Q) != rows or pattern_type(pair.P) != cols:
        return False
    lhs = _product(W[i, j] ** (-nu[i - 1] - lam[j - 1]) for i in range(1, W.n + 1) for j in range(1, W.m + 1))
    rhs = pattern_type_weight(pair.P, [-x for x in lam]) * pattern_type_weight(pair.Q, [-x for x in nu])
    return lhs == rhs


# ---------------------------------------------------------------------------
# energies

def energy(X: WeightMatrix, s: Any) -> Any:
    total = s / X[1, 1]
    for i in range(1, X.n + 1):
        for j in range(1, X.m + 1):
            nbrs = ([X[i - 1, j]] if i > 1 else []) + ([X[i, j - 1]] if j > 1 else [])
            if nbrs:
                total = total + _sum(nbrs) / X[i, j]
    return total


def pattern_energy(P: Pattern, s: Any) -> Any:
    n = P.width
    total = s / P[n, n]
    for i, j in P.indices():
        nbrs = [z for z in (P.get(i - 1, j, None), P.get(i + 1, j + 1, None)) if z is not None]
        if nbrs:
            total = total + _sum(nbrs) / P[i, j]
    return total


def check_energy_split(W: WeightMatrix, s: Any) -> bool:
    T = apply_grsk(W)
    pair = patterns_from_matrix(T)
    if W.n >= W.m:
        split = pattern_energy(pair.P, 0) + pattern_energy(pair.Q, s)
    else:
        split = pattern_energy(pair.P, s) + pattern_energy(pair.Q, 0)
    return split == energy(T, s)


def _input_energy(W: WeightMatrix, s: Any) -> Any:
    p = W.p
    anti = {(i, p - i + 1) for i in range(1, p + 1)}
    total = 0
    for i in range(1, W.n + 1):
        for j in range(1, W.m + 1):
            total = total + (s if (i, j) in anti else 1) / W[i, j]
    return total


def check_fundamental_identity(W: WeightMatrix, s: Any) -> bool:
    return _input_energy(W, s) == energy(apply_grsk(W), s)


def check_t11_identity(W: WeightMatrix) -> bool:
    p = W.p
    lhs = _sum([1 / W[i, p - i + 1] for i in range(1, p + 1)])
    return lhs == 1 / apply_grsk(W)[1, 1]


def check_volume_form(W: WeightMatrix, s: Any, theta_hat: Sequence[int], theta: Sequence[int]) -> bool:
    """Integrand of the polymer measure rewritten on the output side: weight and exponent parts"""
    return check_pq(W, theta_hat, theta) and check_fundamental_identity(W, s)


# ---------------------------------------------------------------------------
# path oracle

def path_partition_oracle(W: WeightMatrix, k: int, r: int) -> Any:
    """Sum over r-tuples of non-intersecting paths (1,q) -> (n, k-r+q) of weight products"""
    n, m = W.n, W.m
    if n + m > PATH_ORACLE_MAX_SIZE:
        raise UsageError(f"Path enumeration refused for n+m={n + m} > {PATH_ORACLE_MAX_SIZE}")
    if not (1 <= k <= m and 1 <= r <= min(n, k)):
        raise UsageError(f"Invalid (k, r) = ({k}, {r}) for a {n}x{m} matrix")
    pairs = [((1, q), (n, k - r + q)) for q in range(1, r + 1)]
    total = 0
    for cells in PathEnumerator().non_intersecting(pairs):
        total = total + _product(W[c] for c in cells)
    return total


def check_path_identity(W: WeightMatrix) -> bool:
    """t_{n-r+1,k-r+1} ... t_{nk} against the oracle, for W and its transpose"""
    for X in (W, W.transpose()):
        T = apply_grsk(X)
        for k in range(1, X.m + 1):
            for r in range(1, min(X.n, k) + 1):
                product = _product(T[X.n - q, k - q] for q in range(r))
                if product != path_partition_oracle(X, k, r):
                    logger.debug(f"Path identity fails at k={k}, r={r} on {X.n}x{X.m}")
                    return False
    return True


# ---------------------------------------------------------------------------
# Bender-Knuth moves and the Schuetzenberger involution

def bk_neighbour_sums(x: Grid, i: int, j: int) -> Tuple[Any, Any]:
    """(x_{i,j-1} + x_{i-1,j}, 1/x_{i+1,j} + 1/x_{i,j+1}) with the boundary conventions.

    Missing up/left neighbours count 0 and missing down/right neighbours
    count infinity, except that the up/left sum is 1 at (1,1) and the
    down/right sum is 1 at (n,m).
    """
    n, m = len(x), len(x[0])
    if (i, j) == (1, 1):
        up_left = 1
    else:
        up_left = _sum(([x[i - 1][j - 2]] if j > 1 else []) + ([x[i - 2][j - 1]] if i > 1 else []))
    if (i, j) == (n, m):
        down_right = 1
    else:
        down_right = _sum(([1 / x[i][j - 1]] if i < n else []) + ([1 / x[i - 1][j]] if j < m else []))
    return up_left, down_right


def bender_knuth_in_place(x: Grid, i: int, j: int) -> None:
    up_left, down_right = bk_neighbour_sums(x, i, j)
    x[i - 1][j - 1] = up_left / (x[i - 1][j - 1] * down_right)


def bender_knuth(X: WeightMatrix, i: int, j: int) -> WeightMatrix:
    _check_index(X, i, j)
    x = X.to_lists()
    bender_knuth_in_place(x, i, j)
    return WeightMatrix(x)


def closed_energy(X: WeightMatrix) -> Any:
    """E_1(X) + x_nm, preserved by every b_ij including the two corners"""
    return energy(X, 1) + X[X.n, X.m]


def r_map(X: WeightMatrix, j: int) -> WeightMatrix:
    _check_index(X, X.n, j)
    x = X.to_lists()
    n = X.n
    x[n - 1][j - 1] = (x[n - 1][j] if j < X.m else 1) / x[n - 1][j - 1]
    return WeightMatrix(x)


def h_map(X: WeightMatrix, j: int) -> WeightMatrix:
    """b_nj first, then up the diagonal to row 1 or column 1"""
    _check_index(X, X.n, j)
    x = X.to_lists()
    k = 0
    while X.n - k >= 1 and j - k >= 1:
        bender_knuth_in_place(x, X.n - k, j - k)
        k += 1
    return WeightMatrix(x)


def check_rho_factorisation(X: WeightMatrix) -> bool:
    """rho^n_j = h_j o r_j for every j, and R_n = rho^n_m o ... o rho^n_1"""
    for j in range(1, X.m + 1):
        if rho_map(X, X.n, j) != h_map(r_map(X, j), j):
            return False
    Y = X
    for j in range(1, X.m + 1):
        Y = rho_map(Y, X.n, j)
    return Y == row_insert_step(X, X.n)


def _require_triangle(P: Pattern) -> int:
    if P.height != P.width:
        raise UsageError("Bender-Knuth moves on patterns need the square case (a triangle)")
    return P.height


def t_map(P: Pattern, j: int) -> Pattern:
    """t_j: h_j acting on the P half of any matrix identified with (P, Q)"""
    n = _require_triangle(P)
    if not 1 <= j < n:
        raise UsageError(f"t_j needs 1 <= j < {n}")
    return patterns_from_matrix(h_map(matrix_from_patterns(P, P), j)).P


def schuetzenberger(P: Pattern, i: int) -> Pattern:
    """q_i = t_1 o (t_2 o t_1) o ... o (t_i o ... o t_1)"""
    n = _require_triangle(P)
    if not 1 <= i < n:
        raise UsageError(f"q_i needs 1 <= i < {n}")
    for block in range(i, 0, -1):
        for j in range(1, block + 1):
            P = t_map(P, j)
    return P


def coxeter_involution(P: Pattern, i: int) -> Pattern:
    """s_i = q_i o t_1 o q_i"""
    return schuetzenberger(t_map(schuetzenberger(P, i), 1), i)


def braid_check(P: Pattern, i: int) -> bool:
    """(s_i s_{i+1})^3 = Id at P"""
    n = _require_triangle(P)
    if not 1 <= i < n - 1:
        raise UsageError(f"braid relation needs 1 <= i < {n - 1}")
    Z = P
    for _ in range(3):
        Z = coxeter_involution(coxeter_involution(Z, i + 1), i)
    return Z == P


# ---------------------------------------------------------------------------
# Jacobians and symmetry

NAMED_MAPS = {
    'grsk': apply_grsk,
    'grsk-inverse': invert_grsk,
    'local_move': local_move,
    'bender_knuth': bender_knuth,
    'rho': rho_map,
}


def log_jacobian_flat(values: Sequence[Fraction], fn: Callable[[List[Any]], List[Any]]) -> Fraction:
    det = log_jacobian_from_duals(values, fn(dual_seed(values)))
    if det not in (1, -1):
        raise VerificationFailure(f"Log-Jacobian determinant is {det}, expected +1 or -1")
    return det


def log_jacobian_det(map_fn: Union[str, Callable[..., WeightMatrix]], X: WeightMatrix, **kwargs) -> Fraction:
    fn = NAMED_MAPS[map_fn] if isinstance(map_fn, str) else map_fn
    return log_jacobian_flat(X.flat(), lambda d: fn(WeightMatrix.from_flat(d, X.n, X.m), **kwargs).flat())


def log_jacobian_det_pattern(fn: Callable[[Pattern], Pattern], P: Pattern) -> Fraction:
    """Log-Jacobian of a map on patterns, in row-major pattern coordinates"""
    values = [P[c] for c in P.indices()]

    def flat_fn(duals):
        it = iter(duals)
        seeded = Pattern([[next(it) for _ in row] for row in P.rows], width=P.width)
        out = fn(seeded)
        return [out[c] for c in out.indices()]

    return log_jacobian_flat(values, flat_fn)


def transpose_symmetry_check(W: WeightMatrix) -> bool:
    T = apply_grsk(W)
    Tt = apply_grsk(W.transpose())
    if Tt != T.transpose():
        return False
    pair, pair_t = patterns_from_matrix(T), patterns_from_matrix(Tt)
    return pair_t.P == pair.Q and pair_t.Q == pair.P


# ---------------------------------------------------------------------------

def _sum(items: Sequence[Any]) -> Any:
    items = list(items)
    total = items[0]
    for x in items[1:]:
        total = total + x
    return total


def _product(items) -> Any:
    result = 1
    for x in items:
        result = result * x
    return result
