"""
Tropical (max-plus) RSK and the zero-temperature checks around it
"""
import logging
import math
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from scipy import integrate, stats

from app.api.models import Pattern, WeightMatrix
from app.config.settings import config
from app.services.grsk_core import PATH_ORACLE_MAX_SIZE, apply_grsk, grsk_moves, patterns_from_matrix
from app.services.sample_pool import chunk_generator
from app.utils.errors import DomainError, UsageError
from app.utils.exact_numerics import LogFloat, to_float
from app.utils.lattice_paths import PathEnumerator

logger = logging.getLogger(__name__)

LOG_DOMAIN_BELOW = 1e-2


def _min(a, b):
    return np.minimum(a, b) if isinstance(a, np.ndarray) or isinstance(b, np.ndarray) else min(a, b)


def _max(a, b):
    return np.maximum(a, b) if isinstance(a, np.ndarray) or isinstance(b, np.ndarray) else max(a, b)


def _tmove(y: List[List[Any]], i: int, j: int) -> None:
    if i >= 2 and j >= 2:
        a, b, c, d = y[i - 2][j - 2], y[i - 2][j - 1], y[i - 1][j - 2], y[i - 1][j - 1]
        y[i - 2][j - 2] = _min(b, c) - a
        y[i - 1][j - 1] = d + _max(b, c)
    elif i == 1 and j >= 2:
        y[0][j - 1] = y[0][j - 2] + y[0][j - 1]
    elif j == 1 and i >= 2:
        y[i - 1][0] = y[i - 2][0] + y[i - 1][0]


def _tmove_inverse(y: List[List[Any]], i: int, j: int) -> None:
    if i >= 2 and j >= 2:
        a, b, c, d = y[i - 2][j - 2], y[i - 2][j - 1], y[i - 1][j - 2], y[i - 1][j - 1]
        y[i - 2][j - 2] = _min(b, c) - a
        y[i - 1][j - 1] = d - _max(b, c)
    elif i == 1 and j >= 2:
        y[0][j - 1] = y[0][j - 1] - y[0][j - 2]
    elif j == 1 and i >= 2:
        y[i - 1][0] = y[i - 1][0] - y[i - 2][0]


def _check_index(Y: WeightMatrix, i: int, j: int) -> None:
    if not (1 <= i <= Y.n and 1 <= j <= Y.m):
        raise UsageError(f"Index ({i},{j}) outside {Y.n}x{Y.m} matrix")


def tropical_local_move(Y: WeightMatrix, i: int, j: int) -> WeightMatrix:
    _check_index(Y, i, j)
    y = Y.to_lists()
    _tmove(y, i, j)
    return WeightMatrix(y)


def tropical_local_move_inverse(Y: WeightMatrix, i: int, j: int) -> WeightMatrix:
    _check_index(Y, i, j)
    y = Y.to_lists()
    _tmove_inverse(y, i, j)
    return WeightMatrix(y)


def apply_tropical(Y: WeightMatrix) -> WeightMatrix:
    y = Y.to_lists()
    for move in grsk_moves(Y.n, Y.m):
        _tmove(y, *move)
    return WeightMatrix(y)


def invert_tropical(U: WeightMatrix) -> WeightMatrix:
    y = U.to_lists()
    for move in reversed(grsk_moves(U.n, U.m)):
        _tmove_inverse(y, *move)
    return WeightMatrix(y)


# ---------------------------------------------------------------------------
# last passage

def last_passage_oracle(Y: WeightMatrix, k: int, r: int) -> Any:
    """Max over r non-intersecting paths (1,q) -> (n, k-r+q) of the summed entries"""
    n, m = Y.n, Y.m
    if n + m > PATH_ORACLE_MAX_SIZE:
        raise UsageError(f"Path enumeration refused for n+m={n + m} > {PATH_ORACLE_MAX_SIZE}")
    if not (1 <= k <= m and 1 <= r <= min(n, k)):
        raise UsageError(f"Invalid (k, r) = ({k}, {r}) for a {n}x{m} matrix")
    pairs = [((1, q), (n, k - r + q)) for q in range(1, r + 1)]
    best = None
    for cells in PathEnumerator().non_intersecting(pairs):
        total = sum(Y[c] for c in cells)
        best = total if best is None else max(best, total)
    return best


def check_greene(Y: WeightMatrix) -> bool:
    """u_{n,k} + ... + u_{n-r+1,k-r+1} against the oracle, for Y and its transpose"""
    for X in (Y, Y.transpose()):
        U = apply_tropical(X)
        for k in range(1, X.m + 1):
            for r in range(1, min(X.n, k) + 1):
                if sum(U[X.n - q, k - q] for q in range(r)) != last_passage_oracle(X, k, r):
                    return False
    return True


def tropical_energy(U: WeightMatrix, sigma: Optional[Any] = None) -> Any:
    """Max-plus energy: max(sigma - u_11, max over cells of max(up, left) - u)"""
    terms = [] if sigma is None else [sigma - U[1, 1]]
    for i in range(1, U.n + 1):
        for j in range(1, U.m + 1):
            nbrs = ([U[i - 1, j]] if i > 1 else []) + ([U[i, j - 1]] if j > 1 else [])
            if nbrs:
                terms.append(max(nbrs) - U[i, j])
    return max(terms) if terms else None


def check_tropical_energy_identity(Y: WeightMatrix, sigma: Optional[Any] = None) -> bool:
    """max over anti-diagonal of sigma - y and elsewhere of -y equals the energy of U(Y)"""
    p = Y.p
    anti = {(i, p - i + 1) for i in range(1, p + 1)}
    terms = []
    for i in range(1, Y.n + 1):
        for j in range(1, Y.m + 1):
            if (i, j) in anti:
                if sigma is not None:
                    terms.append(sigma - Y[i, j])
            else:
                terms.append(-Y[i, j])
    lhs = max(terms) if terms else None
    return lhs == tropical_energy(apply_tropical(Y), sigma)


# ---------------------------------------------------------------------------
# Gelfand-Tsetlin patterns

def is_gelfand_tsetlin(R: Pattern) -> bool:
    """r_nn >= 0 and r_{i+1,j+1} <= r_ij <= r_{i+1,j}, reading r_{i+1,n+1} as 0 for i >= n"""
    n = R.width
    if R[n, n] < 0:
        return False
    for i, j in R.indices():
        if i == R.height:
            continue
        upper = R[i + 1, j]
        lower = R[i + 1, j + 1] if j < n else 0
        if not lower <= R[i, j] <= upper:
            return False
    return True


def gt_membership_check(Y: WeightMatrix) -> bool:
    """Both output patterns are Gelfand-Tsetlin exactly when Y is nonnegative"""
    pair = patterns_from_matrix(apply_tropical(Y))
    both_gt = is_gelfand_tsetlin(pair.P) and is_gelfand_tsetlin(pair.Q)
    nonnegative = all(y >= 0 for y in Y.flat())
    return both_gt == nonnegative


# ---------------------------------------------------------------------------
# tropicalization of the geometric map

def tropicalization_limit_check(Y: WeightMatrix, eps_list: Sequence[float] = (1e-1, 1e-2, 1e-3)) -> Dict[str, Any]:
    """Max-entry error of eps log T(e^{Y/eps}) against U(Y) for each eps"""
    U = apply_tropical(Y.map(to_float))
    errors = []
    for eps in eps_list:
        if eps < LOG_DOMAIN_BELOW:
            T = apply_grsk(Y.map(lambda y: LogFloat(to_float(y) / eps)))
            logs = T.map(lambda t: t.log)
        else:
            T = apply_grsk(Y.map(lambda y: math.exp(to_float(y) / eps)))
            logs = T.map(math.log)
        err = max(abs(eps * lt - u) for lt, u in zip(logs.flat(), U.flat()))
        errors.append(float(err))
        logger.debug(f"eps={eps:g} tropicalization error {err:.3e}")
    monotone = all(b <= a + 1e-12 for a, b in zip(errors, errors[1:]))
    return {'eps': list(eps_list), 'errors': errors, 'monotone': monotone}


# ---------------------------------------------------------------------------
# J_lambda and the zero-temperature Cauchy identity

def j_lambda(x: Sequence[float], lam: Sequence[complex]) -> complex:
    """det(e^{-lam_i x_j}) / prod_{i>j} (lam_i - lam_j)"""
    n = len(lam)
    if len(x) != n:
        raise UsageError("j_lambda needs len(x) == len(lambda)")
    if any(xi < 0 for xi in x):
        raise DomainError("j_lambda needs nonnegative x")
    lam = np.asarray(lam, dtype=complex)
    vandermonde = 1.0 + 0j
    for i in range(n):
        for j in range(i):
            diff = lam[i] - lam[j]
            if diff == 0:
                raise DomainError("j_lambda needs pairwise distinct lambda (confluent case not supported)")
            vandermonde *= diff
    matrix = np.exp(-np.outer(lam, np.asarray(x, dtype=float)))
    return complex(np.linalg.det(matrix) / vandermonde)


def _cone_integral(fn, n: int) -> complex:
    """Integral of a complex fn over the cone x_1 >= ... >= x_n >= 0, n <= 2"""
    parts = []
    for part in (lambda *a: fn(*a).real, lambda *a: fn(*a).imag):
        if n == 1:
            value, _ = integrate.quad(lambda x: part(x), 0, np.inf, epsabs=0, epsrel=1e-11, limit=200)
        else:
            # outer x_2 on [0, inf), inner x_1 on [x_2, inf)
            value, _ = integrate.dblquad(lambda x1, x2: part(x1, x2), 0, np.inf, lambda x2: x2, lambda x2: np.inf,
                                         epsabs=0, epsrel=1e-10)
        parts.append(value)
    return complex(parts[0], parts[1])


def tropical_cauchy_check(nu: Sequence[complex], lam: Sequence[complex], tol: float = 1e-6) -> Dict[str, Any]:
    n = len(nu)
    if len(lam) != n or n not in (1, 2):
        raise UsageError("tropical_cauchy_check supports n = m in {1, 2}")
    if any((a + b).real <= 0 for a in nu for b in lam):
        raise UsageError("Need Re(nu_i + lambda_j) > 0")
    lhs = _cone_integral(lambda *x: j_lambda(x, nu) * j_lambda(x, lam), n)
    rhs = 1.0 + 0j
    for a in nu:
        for b in lam:
            rhs /= (a + b)
    rel_error = abs(lhs - rhs) / abs(rhs)
    return {'lhs': lhs, 'rhs': rhs, 'rel_error': rel_error, 'passed': rel_error <= tol}


# ---------------------------------------------------------------------------
# exponential last passage against the Laguerre marginal

def _marginal_density(a: Sequence[float], b: Sequence[float], x1: float) -> float:
    rates = np.prod([ai + bj for ai in a for bj in b])
    if len(a) == 1:
        return float((rates * j_lambda([x1], a) * j_lambda([x1], b)).real)
    value, _ = integrate.quad(lambda x2: (j_lambda([x1, x2], a) * j_lambda([x1, x2], b)).real, 0, x1,
                              epsabs=0, epsrel=1e-10)
    return float(rates * value)


def laguerre_marginal_check(a: Sequence[float], b: Sequence[float], samples: int = 100000,
                            seed: int = 0, grid_points: int = 2001) -> Dict[str, Any]:
    """Empirical law of u_nm for exponential weights against the first marginal of the ensemble"""
    n = len(a)
    if len(b) != n or n not in (1, 2):
        raise UsageError("laguerre_marginal_check supports n = m in {1, 2}")
    if any(ai + bj <= 0 for ai in a for bj in b):
        raise UsageError("Need a_i + b_j > 0")

    rng = chunk_generator(seed, 0)
    Y = WeightMatrix([[rng.exponential(1.0 / (a[i] + b[j]), size=samples) for j in range(n)] for i in range(n)])
    u = np.asarray(apply_tropical(Y)[n, n])

    upper = 50.0 / min(ai + bj for ai in a for bj in b)
    grid = np.linspace(0.0, upper, grid_points)
    density = np.array([_marginal_density(a, b, x) for x in grid])
    cdf = integrate.cumulative_trapezoid(density, grid, initial=0.0)
    mass = cdf[-1]
    mean_ref = integrate.trapezoid(grid * density, grid)

    ks = stats.kstest(u, lambda x: np.interp(x, grid, cdf / mass))
    mc_config = config.get_monte_carlo_config()
    threshold = max(mc_config.get('ks_distance', 0.01), 1.95 / math.sqrt(samples))
    stderr = float(np.std(u, ddof=1) / math.sqrt(samples))
    z = (float(np.mean(u)) - mean_ref) / stderr
    return {
        'ks_statistic': float(ks.statistic),
        'ks_pvalue': float(ks.pvalue),
        'ks_threshold': threshold,
        'mass': float(mass),
        'mean': float(np.mean(u)),
        'mean_reference': float(mean_ref),
        'z': z,
        'passed': ks.statistic < threshold and abs(z) <= mc_config.get('z_threshold', 3.5),
    }
