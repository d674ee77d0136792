"""
GL(n, R) Whittaker functions at small n.

Psi^n_lambda is built from the recursion Psi^n = Q^{n,n-1}_{lambda_n} Psi^{n-1}
and Psi^n_{lambda;s} from Q^n_{lambda_{n+k}} ... Q^n_{lambda_{n+1}} applied to
e^{-s/x_n} Psi^n. Every integral is taken in log coordinates (dx/x -> du) and
the recursion is vectorised: one call integrates a whole batch of evaluation
points, whose inner integrals are again one batched call.
"""
import logging
import math
from itertools import permutations
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize, special, stats

from app.api.models import QuadratureSpec
from app.config.settings import config
from app.services.sample_pool import chunk_generator
from app.utils.errors import DomainError, QuadratureBudgetError, UsageError
from app.utils.quadrature import (integrate_over_log_space, lattice_integrate, max_batch_points, nodes_per_box,
                                  tanh_sinh_rule, tensor_grid, tolerance_spec)

logger = logging.getLogger(__name__)

MAX_PSI_N = 4
MAX_IDENTITY_N = 3
TRUNCATION_FLOOR = 1e-18

STADE_KINDS = {
    'square': 'square',
    'rect': 'rectangular',
    'rectangular': 'rectangular',
    'bf': 'bump-friedberg',
    'bump-friedberg': 'bump-friedberg',
}
STADE_TOLERANCES = {
    ('square', 1): 1e-8,
    ('square', 2): 1e-5,
    ('square', 3): 1e-3,
    ('rectangular', 1): 1e-6,
    ('rectangular', 2): 1e-4,
    ('bump-friedberg', 1): 1e-6,
    ('bump-friedberg', 2): 1e-3,
    ('bump-friedberg', 3): 1e-3,
}


def default_quadrature() -> QuadratureSpec:
    settings = config.get_quadrature_config()
    return QuadratureSpec(**{k: v for k, v in settings.items() if k in QuadratureSpec.model_fields})


def _resolve_spec(spec: Optional[QuadratureSpec]) -> QuadratureSpec:
    spec = spec or default_quadrature()
    if not spec.log_substitution:
        raise UsageError("Whittaker integrals are only evaluated after the substitution x = e^u")
    return spec


# ---------------------------------------------------------------------------
# kernels

def _log_q(lam: complex, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """log Q^n_lam(e^u, e^v); u and v of shape (..., n)"""
    return (lam * (v.sum(-1) - u.sum(-1))
            - np.exp(v - u).sum(-1)
            - np.exp(u[..., 1:] - v[..., :-1]).sum(-1))


def _log_q_down(lam: complex, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """log Q^{n,n-1}_lam(e^u, e^v); u of shape (..., n), v of shape (..., n-1)"""
    return (lam * (v.sum(-1) - u.sum(-1))
            - np.exp(v - u[..., :-1]).sum(-1)
            - np.exp(u[..., 1:] - v).sum(-1))


def _positive_vector(values: Sequence[float], size: int, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size != size:
        raise UsageError(f"{name} must have {size} entries, got {arr.size}")
    if np.any(arr <= 0):
        raise DomainError(f"{name} must be strictly positive")
    return arr


def q_kernel(n: int, lam: complex, x: Sequence[float], y: Sequence[float]) -> complex:
    u = np.log(_positive_vector(x, n, "x"))
    v = np.log(_positive_vector(y, n, "y"))
    return complex(np.exp(_log_q(complex(lam), u, v)))


def q_kernel_down(n: int, lam: complex, x: Sequence[float], y: Sequence[float]) -> complex:
    if n < 2:
        raise UsageError("Q^{n,n-1} needs n >= 2")
    u = np.log(_positive_vector(x, n, "x"))
    v = np.log(_positive_vector(y, n - 1, "y"))
    return complex(np.exp(_log_q_down(complex(lam), u, v)))


# ---------------------------------------------------------------------------
# batched recursion

def _integrate_rows(integrand: Callable[[np.ndarray, np.ndarray], np.ndarray], U: np.ndarray,
                    lo: np.ndarray, hi: np.ndarray, spec: QuadratureSpec) -> np.ndarray:
    """Row b of the result is the integral of integrand(U[b], v) dv over the box lo[b]..hi[b]"""
    per_row = nodes_per_box(lo, hi, spec)
    chunk = max(1, max_batch_points() // per_row)
    out = np.empty(U.shape[0], dtype=complex)
    for start in range(0, U.shape[0], chunk):
        rows = slice(start, start + chunk)
        nodes, weights = tensor_grid(lo[rows], hi[rows], spec)
        out[rows] = np.sum(weights * integrand(U[rows], nodes), axis=1)
    return out


def _integrate_level(log_kernel: Callable[[np.ndarray, np.ndarray], np.ndarray],
                     inner: Callable[[np.ndarray], np.ndarray], U: np.ndarray,
                     lo: np.ndarray, hi: np.ndarray, spec: QuadratureSpec) -> np.ndarray:
    """Integral of exp(log_kernel(U[b], v)) inner(v) dv over the box lo[b]..hi[b] for every row b"""
    if spec.rule == 'trapezoid':
        return lattice_integrate(U, lo, hi, log_kernel, inner, spec)

    def integrand(rows: np.ndarray, V: np.ndarray) -> np.ndarray:
        B, N, d = V.shape
        return np.exp(log_kernel(rows[:, None, :], V)) * inner(V.reshape(B * N, d)).reshape(B, N)

    return _integrate_rows(integrand, U, lo, hi, spec)


def _gap_windows(U: np.ndarray, pad: float) -> Tuple[np.ndarray, np.ndarray]:
    # y_i interlaces x_i and x_{i+1}
    a, b = U[:, :-1], U[:, 1:]
    return np.minimum(a, b) - pad, np.maximum(a, b) + pad


def _psi_values(lam: np.ndarray, U: np.ndarray, spec: QuadratureSpec) -> np.ndarray:
    """Psi^n_lam(e^U) for a batch U of shape (B, n)"""
    n = U.shape[1]
    if n == 1:
        return np.exp(-lam[0] * U[:, 0])

    lo, hi = _gap_windows(U, spec.window)
    return _integrate_level(lambda rows, V: _log_q_down(lam[-1], rows, V),
                            lambda V: _psi_values(lam[:-1], V, spec), U, lo, hi, spec)


def _psi_s_values(lam: np.ndarray, s: complex, U: np.ndarray, spec: QuadratureSpec) -> np.ndarray:
    """Psi^n_{lam;s}(e^U) with n = U.shape[1] and k = len(lam) - n"""
    n = U.shape[1]
    if lam.size == n:
        return np.exp(-s * np.exp(-U[:, -1])) * _psi_values(lam, U, spec)

    lo_gap, hi_gap = _gap_windows(U, spec.window)
    # y_n sits between s and x_n
    log_s = math.log(abs(s))
    lo_last = np.minimum(U[:, -1], log_s) - spec.window
    hi_last = np.maximum(U[:, -1], log_s) + spec.window
    lo = np.column_stack([lo_gap, lo_last])
    hi = np.column_stack([hi_gap, hi_last])
    return _integrate_level(lambda rows, V: _log_q(lam[-1], rows, V),
                            lambda V: _psi_s_values(lam[:-1], s, V, spec), U, lo, hi, spec)


def _refine(evaluate: Callable[[QuadratureSpec], np.ndarray], spec: QuadratureSpec) -> Tuple[np.ndarray, float]:
    """Halve the step until two successive values agree to spec.tol (relative)"""
    current = spec
    value = evaluate(current)
    achieved = math.inf
    for _ in range(spec.max_refinements + 1):
        finer = current.halved()
        refined = evaluate(finer)
        diff = np.abs(refined - value)
        scale = np.maximum(np.abs(refined), np.finfo(float).tiny)
        achieved = float(np.max(diff / scale))
        if achieved <= spec.tol:
            return refined, float(np.max(diff))
        current, value = finer, refined
    logger.error(f"Quadrature refinement budget exhausted at relative error {achieved:.2e}")
    raise QuadratureBudgetError(f"Quadrature did not reach tolerance {spec.tol:.1e} "
                                f"(achieved {achieved:.2e})", achieved=achieved)


def _check_psi_args(n: int, lam: Sequence[complex], x: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    if not 1 <= n <= MAX_PSI_N:
        raise UsageError(f"Whittaker functions are evaluated for 1 <= n <= {MAX_PSI_N}")
    lam = np.asarray(lam, dtype=complex).ravel()
    if lam.size < n:
        raise UsageError(f"lambda needs at least {n} entries for n={n}")
    if lam.size > MAX_PSI_N:
        raise UsageError(f"n + k must not exceed {MAX_PSI_N}")
    return lam, _positive_vector(x, n, "x")


def psi_with_error(n: int, lam: Sequence[complex], x: Sequence[float],
                   spec: Optional[QuadratureSpec] = None) -> Tuple[complex, float]:
    lam, x = _check_psi_args(n, lam, x)
    if lam.size != n:
        raise UsageError(f"lambda must have exactly {n} entries")
    if n == 1:
        return complex(x[0] ** (-lam[0])), 0.0
    spec = _resolve_spec(spec)
    U = np.log(x)[None, :]
    value, error = _refine(lambda sp: _psi_values(lam, U, sp), spec)
    return complex(value[0]), error


def psi(n: int, lam: Sequence[complex], x: Sequence[float], spec: Optional[QuadratureSpec] = None) -> complex:
    return psi_with_error(n, lam, x, spec)[0]


def psi_batch(lam: Sequence[complex], X: np.ndarray, spec: Optional[QuadratureSpec] = None) -> np.ndarray:
    """Psi_lam at every row of X (shape (B, n)), no refinement"""
    lam = np.asarray(lam, dtype=complex).ravel()
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != lam.size:
        raise UsageError("Rows of X must have one entry per lambda")
    return _psi_values(lam, np.log(X), _resolve_spec(spec))


def psi_s_batch(lam: Sequence[complex], s: complex, X: np.ndarray, spec: Optional[QuadratureSpec] = None) -> np.ndarray:
    lam = np.asarray(lam, dtype=complex).ravel()
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] > lam.size:
        raise UsageError("Psi_{lambda;s} needs at least one lambda per coordinate")
    return _psi_s_values(lam, complex(s), np.log(X), _resolve_spec(spec))


def psi_s_with_error(n: int, lam: Sequence[complex], s: complex, x: Sequence[float],
                     spec: Optional[QuadratureSpec] = None) -> Tuple[complex, float]:
    lam, x = _check_psi_args(n, lam, x)
    s = complex(s)
    U = np.log(x)[None, :]
    if lam.size == n:
        value, error = psi_with_error(n, lam, x, spec)
        factor = np.exp(-s / x[-1])
        return complex(factor * value), float(abs(factor) * error)
    if s.real <= 0:
        raise DomainError("Psi_{lambda;s} with k >= 1 needs Re s > 0")
    spec = _resolve_spec(spec)
    value, error = _refine(lambda sp: _psi_s_values(lam, s, U, sp), spec)
    return complex(value[0]), error


def psi_s(n: int, lam: Sequence[complex], s: complex, x: Sequence[float],
          spec: Optional[QuadratureSpec] = None) -> complex:
    return psi_s_with_error(n, lam, s, x, spec)[0]


# ---------------------------------------------------------------------------
# Macdonald function

def bessel_k(nu: complex, z: float, tol: float = 1e-14, max_refinements: int = 8) -> complex:
    """K_nu(z) = 1/2 int_R e^{nu u - z cosh u} du, tanh-sinh on a window where the integrand is negligible outside"""
    if z <= 0:
        raise DomainError("bessel_k needs z > 0")
    nu = complex(nu)
    a = abs(nu.real)
    upper = 1.0
    while z * math.cosh(upper) - a * upper < 60.0:
        upper += 0.5
    lo, hi = np.array([-upper]), np.array([upper])

    points, previous = 33, None
    for _ in range(max_refinements):
        u, w = tanh_sinh_rule(lo, hi, points)
        value = 0.5 * complex(np.sum(w[0] * np.exp(nu * u[0] - z * np.cosh(u[0]))))
        if previous is not None and abs(value - previous) <= tol * abs(value):
            return value
        previous, points = value, 2 * points - 1
    raise QuadratureBudgetError(f"bessel_k({nu}, {z}) did not converge",
                                achieved=abs(value - previous) / abs(value))


# ---------------------------------------------------------------------------
# pattern generating function

def _pattern_cells(n: int, h: int):
    return [(i, j) for i in range(1, h) for j in range(1, min(i, n) + 1)]


def _pattern_log_integrand(n: int, h: int, lam: np.ndarray, s: complex,
                           x: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    """log of P^{-lam} e^{-F_s(P)} as a function of the logs of the free entries"""
    cells = _pattern_cells(n, h)
    log_x = np.log(x)

    def log_integrand(Uf: np.ndarray) -> np.ndarray:
        N = Uf.shape[0]
        lz = {cell: Uf[:, k] for k, cell in enumerate(cells)}
        for j in range(1, n + 1):
            lz[h, j] = np.full(N, log_x[j - 1])

        total = np.zeros(N, dtype=complex)
        previous = np.zeros(N)
        for i in range(1, h + 1):
            row = sum(lz[i, j] for j in range(1, min(i, n) + 1))
            total -= lam[i - 1] * (row - previous)
            previous = row

        energy = s * np.exp(-lz[n, n])
        for (i, j), value in lz.items():
            for nb in ((i - 1, j), (i + 1, j + 1)):
                if nb in lz:
                    energy = energy + np.exp(lz[nb] - value)
        return total - energy

    return log_integrand


def psi_pattern_mc(n: int, h: int, lam: Sequence[complex], s: complex, x: Sequence[float],
                   samples: int = 20000, seed: int = 0) -> Dict[str, Any]:
    """Importance-sampling estimate of the pattern integral over rows 1..h-1 with bottom row x"""
    if h < n:
        raise UsageError("Pattern height must be at least n")
    lam = np.asarray(lam, dtype=complex).ravel()
    if lam.size != h:
        raise UsageError(f"lambda must have h={h} entries")
    x = _positive_vector(x, n, "x")
    s = complex(s)

    cells = _pattern_cells(n, h)
    d = len(cells)
    log_integrand = _pattern_log_integrand(n, h, lam, s, x)
    if d == 0:
        return {'estimate': complex(np.exp(log_integrand(np.zeros((1, 0))))[0]), 'stderr': 0.0,
                'free_entries': 0, 'samples': 0}

    start = np.full(d, float(np.mean(np.log(x))))
    mode = optimize.minimize(lambda u: -float(np.real(log_integrand(u[None, :])[0])), start, method='BFGS')
    cov = np.atleast_2d(mode.hess_inv)
    eigval, eigvec = np.linalg.eigh(0.5 * (cov + cov.T))
    shape = (eigvec * np.clip(2.0 * eigval, 1e-3, None)) @ eigvec.T
    proposal = stats.multivariate_t(loc=mode.x, shape=shape, df=5)

    rng = chunk_generator(seed, 0)
    draws = np.asarray(proposal.rvs(size=samples, random_state=rng)).reshape(samples, d)
    log_w = log_integrand(draws) - np.atleast_1d(proposal.logpdf(draws))
    weights = np.exp(log_w)
    estimate = complex(np.mean(weights))
    stderr = float(np.sqrt(np.mean(np.abs(weights - estimate) ** 2) / samples))
    logger.debug(f"pattern MC n={n} h={h}: {estimate} +/- {stderr:.2e} ({d} free entries)")
    return {'estimate': estimate, 'stderr': stderr, 'free_entries': d, 'samples': samples}


def check_pattern_mc(n: int, h: int, lam: Sequence[complex], s: complex, x: Sequence[float],
                     samples: int = 20000, seed: int = 0, spec: Optional[QuadratureSpec] = None) -> Dict[str, Any]:
    mc = psi_pattern_mc(n, h, lam, s, x, samples, seed)
    reference, error = psi_s_with_error(n, lam, s, x, spec)
    sigma = math.hypot(mc['stderr'], error)
    gap = abs(mc['estimate'] - reference)
    return {'estimate': mc['estimate'], 'stderr': mc['stderr'], 'reference': reference,
            'passed': gap <= 3 * sigma + 1e-12 * abs(reference)}


# ---------------------------------------------------------------------------
# identities

def _rel(exact: complex, approx: complex) -> float:
    return abs(approx - exact) / abs(exact) if exact != 0 else abs(approx)


def elementary_identity_checks(n: int, lam: Sequence[complex], x: Sequence[float], a: float = 2.0, c: float = 0.3,
                               spec: Optional[QuadratureSpec] = None, tol: float = 1e-6) -> Dict[str, Any]:
    """Homogeneity, shift and reflection identities at one point"""
    if n > MAX_IDENTITY_N:
        raise UsageError(f"Identity checks are limited to n <= {MAX_IDENTITY_N}")
    lam = np.asarray(lam, dtype=complex)
    x = _positive_vector(x, n, "x")
    base = psi(n, lam, x, spec)

    errors = {
        'homogeneity': _rel(a ** (-lam.sum()) * base, psi(n, lam, a * x, spec)),
        'shift': _rel(np.prod(x ** (-c)) * base, psi(n, lam + c, x, spec)),
        'reflection': _rel(base, psi(n, -lam, 1.0 / x[::-1], spec)),
    }
    return {**errors, 'passed': all(e <= tol for e in errors.values())}


def sklyanin_density(lam: Sequence[complex]) -> complex:
    lam = np.asarray(lam, dtype=complex).ravel()
    n = lam.size
    diffs = [lam[i] - lam[j] for i in range(n) for j in range(n) if i != j]
    product = np.prod(special.rgamma(np.asarray(diffs, dtype=complex))) if diffs else 1.0
    return complex(product / ((2j * math.pi) ** n * math.factorial(n)))


def check_psi_bessel_grid(spec: Optional[QuadratureSpec] = None, tol: float = 1e-8,
                          orders: Sequence[float] = (0.0, 0.25, 0.5, 1.0, 1.5),
                          ratios: Sequence[float] = (0.25, 0.5, 1.0, 2.0, 4.0)) -> Dict[str, Any]:
    """Psi^2_{(a,-a)}(1, q) against 2 K_{2a}(2 sqrt q) on a grid, and bessel_k against scipy"""
    spec = _resolve_spec(spec)
    spec = spec.model_copy(update={'tol': min(spec.tol, 0.01 * tol)})
    X = np.array([[1.0, q] for q in ratios])
    worst, worst_kv = 0.0, 0.0
    for a in orders:
        values, _ = _refine(lambda sp: _psi_values(np.array([a, -a], dtype=complex), np.log(X), sp), spec)
        for q, value in zip(ratios, values):
            z = 2.0 * math.sqrt(q)
            reference = 2.0 * bessel_k(2 * a, z)
            worst = max(worst, _rel(reference, value))
            worst_kv = max(worst_kv, _rel(special.kv(2 * a, z), bessel_k(2 * a, z)))
    return {'max_rel_error': worst, 'bessel_vs_scipy': worst_kv,
            'passed': worst <= tol and worst_kv <= 1e-10}


def check_psi_symmetry(lam: Sequence[complex], x: Sequence[float], spec: Optional[QuadratureSpec] = None,
                       tol: float = 1e-6) -> Dict[str, Any]:
    lam = list(np.asarray(lam, dtype=complex))
    n = len(lam)
    if n > MAX_IDENTITY_N:
        raise UsageError(f"Symmetry checks are limited to n <= {MAX_IDENTITY_N}")
    values = [psi(n, perm, x, spec) for perm in permutations(lam)]
    spread = max(_rel(values[0], v) for v in values)
    return {'max_rel_spread': spread, 'passed': spread <= tol}


def check_self_consistency(n: int, lam: Sequence[complex], x: Sequence[float],
                           spec: Optional[QuadratureSpec] = None) -> Dict[str, Any]:
    """A finer rule moves psi by no more than the reported error estimate"""
    spec = _resolve_spec(spec)
    value, error = psi_with_error(n, lam, x, spec)
    finer, _ = psi_with_error(n, lam, x, spec.halved())
    change = abs(finer - value)
    return {'value': value, 'error_estimate': error, 'change': change,
            'passed': change <= max(error, spec.tol * abs(value))}


def check_psi_s_symmetry(n: int, lam: Sequence[complex], s: complex, x: Sequence[float],
                         spec: Optional[QuadratureSpec] = None, tol: float = 1e-8) -> Dict[str, Any]:
    """Psi^n_{lambda;s} is unchanged by swapping lambda_1 and lambda_{n+1}"""
    lam = list(np.asarray(lam, dtype=complex))
    if len(lam) < n + 1:
        raise UsageError("The swap needs k >= 1")
    swapped = list(lam)
    swapped[0], swapped[n] = swapped[n], swapped[0]
    spec = _resolve_spec(spec)
    spec = spec.model_copy(update={'tol': min(spec.tol, 0.01 * tol)})
    a, b = psi_s(n, lam, s, x, spec), psi_s(n, swapped, s, x, spec)
    return {'rel_error': _rel(a, b), 'passed': _rel(a, b) <= tol}


def _log_gamma_product(values: Sequence[complex]) -> complex:
    return complex(np.sum(special.loggamma(np.asarray(values, dtype=complex))))


def _require_positive_real_parts(values: Sequence[complex], what: str) -> None:
    if any(complex(v).real <= 0 for v in values):
        raise UsageError(f"Parameters outside the region {what} > 0")


def stade_identity_check(kind: str, nu: Optional[Sequence[complex]] = None, lam: Optional[Sequence[complex]] = None,
                         gamma: Optional[complex] = None, s: float = 1.0, spec: Optional[QuadratureSpec] = None,
                         tol: Optional[float] = None) -> Dict[str, Any]:
    """
    Quadrature check of the Cauchy-type integral identities for Whittaker functions.

    square:          int e^{-s/x_n} Psi_nu Psi_lam dx/x = s^{-sum(nu+lam)} prod Gamma(nu_i + lam_j)
    rectangular:     int Psi^m_{nu;s} Psi^m_lam dx/x with len(nu) = m + 1
    bump-friedberg:  int f^gamma e^{-s/x_n} Psi_lam dx/x, f = prod x_i^{(-1)^i}

    The square and bump-friedberg integrands are homogeneous, so the radial
    coordinate is integrated in closed form and quadrature runs over the
    remaining n - 1 log-ratios.
    """
    if kind not in STADE_KINDS:
        raise UsageError(f"Unknown identity kind '{kind}'")
    kind = STADE_KINDS[kind]
    if s <= 0:
        raise UsageError("s must be positive")
    lam = np.asarray(lam if lam is not None else [], dtype=complex).ravel()
    n = lam.size
    if n == 0:
        raise UsageError("lambda is required")
    log_s = math.log(s)

    if kind == 'square':
        nu = np.asarray(nu, dtype=complex).ravel()
        if nu.size != n or n > MAX_IDENTITY_N:
            raise UsageError(f"square identity needs len(nu) == len(lambda) <= {MAX_IDENTITY_N}")
        pairs = [a + b for a in nu for b in lam]
        _require_positive_real_parts(pairs, "Re(nu_i + lambda_j)")
        total = nu.sum() + lam.sum()
        dim = n - 1

        def integrand(V: np.ndarray) -> np.ndarray:
            U = np.column_stack([V, np.zeros(V.shape[0])])
            return _psi_values(nu, U, spec) * _psi_values(lam, U, spec)

        prefactor = np.exp(special.loggamma(total) - total * log_s)
        rhs = np.exp(_log_gamma_product(pairs) - total * log_s)
        center = None
    elif kind == 'rectangular':
        nu = np.asarray(nu, dtype=complex).ravel()
        if nu.size != n + 1 or n > 2:
            raise UsageError("rectangular identity needs len(nu) == len(lambda) + 1 and len(lambda) <= 2")
        pairs = [a + b for a in nu for b in lam]
        _require_positive_real_parts(pairs, "Re(nu_i + lambda_j)")
        dim = n

        def integrand(V: np.ndarray) -> np.ndarray:
            return _psi_s_values(nu, s, V, spec) * _psi_values(lam, V, spec)

        prefactor = 1.0
        rhs = np.exp(_log_gamma_product(pairs) - (nu[:n] + lam).sum() * log_s)
        center = np.full(n, log_s)
    else:
        if gamma is None or n > MAX_IDENTITY_N:
            raise UsageError(f"bump-friedberg identity needs gamma and len(lambda) <= {MAX_IDENTITY_N}")
        gamma = complex(gamma)
        pairs = [lam[i] + lam[j] for i in range(n) for j in range(i + 1, n)]
        _require_positive_real_parts(list(lam + gamma) + pairs, "Re(lambda_i + gamma), Re(lambda_i + lambda_j)")
        signs = np.array([(-1) ** i for i in range(1, n + 1)], dtype=float)
        radial = lam.sum() + (gamma if n % 2 else 0)
        dim = n - 1

        def integrand(V: np.ndarray) -> np.ndarray:
            U = np.column_stack([V, np.zeros(V.shape[0])])
            return np.exp(gamma * (U @ signs)) * _psi_values(lam, U, spec)

        prefactor = np.exp(special.loggamma(radial) - radial * log_s)
        c_n = np.exp(-gamma * log_s) if n % 2 else 1.0
        rhs = c_n * np.exp(_log_gamma_product(list(lam + gamma) + pairs) - lam.sum() * log_s)
        center = None

    tol = tol if tol is not None else STADE_TOLERANCES[kind, max(1, dim if kind == 'rectangular' else n)]
    spec = _resolve_spec(spec if spec is not None else tolerance_spec(default_quadrature(), tol))

    integral, error = integrate_over_log_space(integrand, dim, spec, center=center,
                                               threshold=max(TRUNCATION_FLOOR, tol * 1e-6))
    lhs = complex(prefactor * integral)
    rhs = complex(rhs)
    rel_error = _rel(rhs, lhs)
    logger.info(f"{kind} identity n={n}: lhs={lhs:.10g} rhs={rhs:.10g} rel_error={rel_error:.2e}")
    return {
        'kind': kind,
        'lhs': lhs,
        'rhs': rhs,
        'rel_error': rel_error,
        'error_estimate': float(abs(prefactor) * error / max(abs(rhs), np.finfo(float).tiny)),
        'tol': tol,
        'passed': rel_error <= tol,
    }
