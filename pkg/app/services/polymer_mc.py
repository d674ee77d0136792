"""
Log-gamma polymer weights and Monte Carlo checks of their push-forward laws.

Samplers return the usual containers with numpy arrays as entries (one
coordinate per draw), so the geometric RSK maps run on a whole chunk at once.
Reference values for the push-forward laws come from quadrature of the
Whittaker-function densities in log coordinates.
"""
import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import special, stats

from app.api.models import (KsResult, McProbe, McReport, MeasureParams, QuadratureSpec, SymmetricWeightMatrix,
                            TriangularArray, WeightMatrix)
from app.config.settings import config
from app.services.grsk_core import apply_grsk
from app.services.grsk_triangular import apply_grsk_triangular
from app.services.sample_pool import SamplePool, chunk_generator
from app.services.whittaker_eval import default_quadrature, psi_batch, psi_s_batch
from app.utils.errors import UsageError
from app.utils.quadrature import integrate_over_log_space

logger = logging.getLogger(__name__)

REFERENCE_REL_TOL = 1e-6
Probe = Tuple[str, Callable[[np.ndarray], np.ndarray]]


def _mc_settings() -> Dict:
    mc = config.get_monte_carlo_config()
    return {
        'samples': int(mc.get('samples', 100000)),
        'z_threshold': float(mc.get('z_threshold', 3.5)),
        'ks_pvalue': float(mc.get('ks_pvalue', 0.001)),
    }


def _require_model(params: MeasureParams, model: str) -> None:
    if params.model != model:
        raise UsageError(f"Expected {model} parameters, got {params.model}")


# ---------------------------------------------------------------------------
# samplers

def sample_rect(params: MeasureParams, rng: np.random.Generator, size: Optional[int] = None) -> WeightMatrix:
    """1/w_ij ~ Gamma(theta_hat_i + theta_j), divided by s on the anti-diagonal i + j = p + 1"""
    _require_model(params, "rect")
    n, m, p = params.n, params.m, min(params.n, params.m)
    rows = []
    for i in range(1, n + 1):
        row = []
        for j in range(1, m + 1):
            g = rng.gamma(params.theta_hat[i - 1] + params.theta[j - 1], 1.0, size)
            row.append(params.s / g if i + j == p + 1 else 1.0 / g)
        rows.append(row)
    return WeightMatrix(rows)


def sample_sym(params: MeasureParams, rng: np.random.Generator, size: Optional[int] = None) -> SymmetricWeightMatrix:
    """1/w_ij ~ Gamma(alpha_i + alpha_j) for i < j, 1/w_ii = 2 Gamma(alpha_i + zeta)"""
    _require_model(params, "sym")
    n, alpha = params.n, params.alpha
    upper = []
    for i in range(n):
        for j in range(i, n):
            if i == j:
                upper.append(0.5 / rng.gamma(alpha[i] + params.zeta, 1.0, size))
            else:
                upper.append(1.0 / rng.gamma(alpha[i] + alpha[j], 1.0, size))
    return SymmetricWeightMatrix(n, upper)


def sample_tri(params: MeasureParams, rng: np.random.Generator, size: Optional[int] = None) -> TriangularArray:
    _require_model(params, "tri")
    alpha = params.alpha
    return TriangularArray([[1.0 / rng.gamma(alpha[i - 1] + alpha[j - 1], 1.0, size) for j in range(1, i)]
                            for i in range(2, params.n + 1)])


SAMPLERS = {'rect': sample_rect, 'sym': sample_sym, 'tri': sample_tri}


def shape_vector(params: MeasureParams, weights) -> np.ndarray:
    """Shape of the output pattern, largest partition function first; shape (draws, p)"""
    if params.model == "tri":
        T = apply_grsk_triangular(weights)
        n = params.n
        cols = [T[n - k, n - k - 1] for k in range(n - 1)]
    else:
        full = weights.to_full() if params.model == "sym" else weights
        T = apply_grsk(full)
        cols = [T[T.n - k, T.m - k] for k in range(T.p)]
    return np.column_stack([np.atleast_1d(c) for c in cols])


def sample_shapes(params: MeasureParams, samples: int, seed: int, pool: Optional[SamplePool] = None) -> np.ndarray:
    pool = pool or SamplePool()
    sampler = SAMPLERS[params.model]

    def chunk(rng: np.random.Generator, size: int) -> Dict[str, np.ndarray]:
        return {'shape': shape_vector(params, sampler(params, rng, size))}

    return pool.run(chunk, samples, seed)['shape']


# ---------------------------------------------------------------------------
# push-forward densities

def _signs(p: int) -> np.ndarray:
    return np.array([(-1) ** i for i in range(1, p + 1)], dtype=float)


def _log_gamma_sum(values) -> float:
    return float(np.sum(special.loggamma(np.asarray(values, dtype=float))))


def rect_density(params: MeasureParams, spec: QuadratureSpec) -> Callable[[np.ndarray], np.ndarray]:
    """Psi^p_theta Psi^p_{theta_hat;s} / Z (n >= m), roles swapped for n < m; argument in log coordinates"""
    theta_hat, theta, s = np.asarray(params.theta_hat), np.asarray(params.theta), params.s
    p = min(params.n, params.m)
    log_z = (_log_gamma_sum([a + b for a in theta_hat for b in theta])
             - math.log(s) * sum(theta_hat[i] + theta[p - 1 - i] for i in range(p)))
    plain, shifted = (theta, theta_hat) if params.n >= params.m else (theta_hat, theta)

    def density(V: np.ndarray) -> np.ndarray:
        X = np.exp(V)
        return psi_batch(plain, X, spec) * psi_s_batch(shifted, s, X, spec) * math.exp(-log_z)

    return density


def sym_density(params: MeasureParams, spec: QuadratureSpec) -> Callable[[np.ndarray], np.ndarray]:
    """4^{floor(n/2) zeta} f^zeta e^{-1/(2 x_n)} Psi_alpha / Z"""
    alpha, zeta, n = np.asarray(params.alpha), params.zeta, params.n
    log_z = (math.log(2) * float(np.sum(alpha + zeta)) + _log_gamma_sum(alpha + zeta)
             + _log_gamma_sum([alpha[i] + alpha[j] for i in range(n) for j in range(i + 1, n)]))
    log_c = (n // 2) * zeta * math.log(4) - log_z
    signs = _signs(n)

    def density(V: np.ndarray) -> np.ndarray:
        log_weight = zeta * (V @ signs) - 0.5 * np.exp(-V[:, -1]) + log_c
        return np.exp(log_weight) * psi_batch(alpha, np.exp(V), spec)

    return density


def tri_density(params: MeasureParams, spec: QuadratureSpec) -> Callable[[np.ndarray], np.ndarray]:
    """f^{alpha_n} e^{-1/x_{n-1}} Psi^{n-1}_{alpha'} / Z on the shape (t_{n,n-1}, ..., t_21)"""
    alpha, n = np.asarray(params.alpha), params.n
    log_z = _log_gamma_sum([alpha[i] + alpha[j] for i in range(n) for j in range(i)])
    signs = _signs(n - 1)

    def density(V: np.ndarray) -> np.ndarray:
        log_weight = alpha[-1] * (V @ signs) - np.exp(-V[:, -1]) - log_z
        return np.exp(log_weight) * psi_batch(alpha[:-1], np.exp(V), spec)

    return density


# ---------------------------------------------------------------------------
# probes

def power_probe(exponents: Sequence[float]) -> Probe:
    u = np.asarray(exponents, dtype=float)
    if not np.any(u):
        return "normalization", lambda X: np.ones(X.shape[0])
    name = "E[" + " ".join(f"x{k + 1}^-{e:g}" for k, e in enumerate(u) if e) + "]"
    return name, lambda X: np.prod(X ** (-u), axis=1)


def laplace_probe(r: float, coord: int = 0) -> Probe:
    return f"E[exp(-{r:g} x{coord + 1})]", lambda X: np.exp(-r * X[:, coord])


def standard_probes(p: int) -> List[Probe]:
    probes = [power_probe([0.0] * p), power_probe([0.2] + [0.0] * (p - 1)), laplace_probe(1.0, 0)]
    if p > 1:
        probes += [power_probe([0.0, 0.3] + [0.0] * (p - 2)), power_probe([0.2, 0.3] + [0.0] * (p - 2)),
                   laplace_probe(1.0, p - 1)]
    return probes


def _mc_estimate(values: np.ndarray) -> Tuple[float, float]:
    return float(np.mean(values)), float(np.std(values, ddof=1) / math.sqrt(values.size))


def compare_with_density(experiment: str, shapes: np.ndarray, probes: List[Probe],
                         density: Callable[[np.ndarray], np.ndarray], spec: QuadratureSpec, seed: int,
                         params: Dict = None) -> McReport:
    """Each probe's empirical mean against its quadrature expectation under the density"""
    settings = _mc_settings()
    p = shapes.shape[1]
    center = np.mean(np.log(shapes), axis=0)
    report = McReport(experiment=experiment, seed=seed, samples=shapes.shape[0], params=params or {})
    for name, g in probes:
        estimate, stderr = _mc_estimate(g(shapes))
        reference, error = integrate_over_log_space(lambda V: density(V) * g(np.exp(V)), p, spec, center=center)
        reference = float(reference.real)
        ref_error = max(error, REFERENCE_REL_TOL * abs(reference))
        report.probes.append(McProbe(probe=name, estimate=estimate, stderr=math.hypot(stderr, ref_error),
                                     reference=reference, z_threshold=settings['z_threshold']))
        logger.debug(f"{experiment} {name}: {estimate:.6g} vs {reference:.6g}")
    return report


# ---------------------------------------------------------------------------
# push-forward checks

def pushforward_check_rect(params: MeasureParams, samples: Optional[int] = None, seed: int = 0,
                           spec: Optional[QuadratureSpec] = None, pool: Optional[SamplePool] = None) -> McReport:
    _require_model(params, "rect")
    p = min(params.n, params.m)
    if p > 2 or max(params.n, params.m) > 4:
        raise UsageError("rect push-forward checks need min(n, m) <= 2 and max(n, m) <= 4")
    samples = samples or _mc_settings()['samples']
    spec = spec or default_quadrature()
    shapes = sample_shapes(params, samples, seed, pool)
    report = compare_with_density("pushforward-rect", shapes, standard_probes(p), rect_density(params, spec),
                                  spec, seed, params.model_dump())

    if params.n == params.m:
        # prod x^{-c} Psi_theta = Psi_{theta + c}: a closed-form probe
        c = 0.25
        theta_hat, theta = np.asarray(params.theta_hat), np.asarray(params.theta)
        log_ratio = (_log_gamma_sum([a + b + c for a in theta_hat for b in theta])
                     - _log_gamma_sum([a + b for a in theta_hat for b in theta])
                     - math.log(params.s) * p * c)
        estimate, stderr = _mc_estimate(np.prod(shapes ** (-c), axis=1))
        report.probes.append(McProbe(probe=f"E[prod x^-{c:g}] closed form", estimate=estimate, stderr=stderr,
                                     reference=math.exp(log_ratio), z_threshold=_mc_settings()['z_threshold']))
    return report


def pushforward_check_sym(params: MeasureParams, samples: Optional[int] = None, seed: int = 0,
                          spec: Optional[QuadratureSpec] = None, pool: Optional[SamplePool] = None,
                          laplace_r: Sequence[float] = (0.5, 1.0, 2.0)) -> McReport:
    _require_model(params, "sym")
    if params.n > 2:
        raise UsageError("sym push-forward checks need n <= 2")
    samples = samples or _mc_settings()['samples']
    spec = spec or default_quadrature()
    shapes = sample_shapes(params, samples, seed, pool)
    n = params.n
    probes = [power_probe([0.0] * n), power_probe([0.2] + [0.0] * (n - 1))]
    if n > 1:
        probes.append(power_probe([0.0, 0.3]))
    # Laplace transform of the law of the polymer partition function t_nn = x_1
    probes += [laplace_probe(r, 0) for r in laplace_r]
    return compare_with_density("pushforward-sym", shapes, probes, sym_density(params, spec), spec, seed,
                                params.model_dump())


def pushforward_check_tri(params: MeasureParams, samples: Optional[int] = None, seed: int = 0,
                          spec: Optional[QuadratureSpec] = None, pool: Optional[SamplePool] = None) -> McReport:
    _require_model(params, "tri")
    if params.n > 3:
        raise UsageError("tri push-forward checks need n <= 3")
    samples = samples or _mc_settings()['samples']
    spec = spec or default_quadrature()
    shapes = sample_shapes(params, samples, seed, pool)
    return compare_with_density("pushforward-tri", shapes, standard_probes(params.n - 1),
                                tri_density(params, spec), spec, seed, params.model_dump())


PUSHFORWARD_CHECKS = {'rect': pushforward_check_rect, 'sym': pushforward_check_sym, 'tri': pushforward_check_tri}


def pushforward_check(params: MeasureParams, samples: Optional[int] = None, seed: int = 0,
                      spec: Optional[QuadratureSpec] = None, pool: Optional[SamplePool] = None) -> McReport:
    return PUSHFORWARD_CHECKS[params.model](params, samples=samples, seed=seed, spec=spec, pool=pool)


# ---------------------------------------------------------------------------
# distributional identities

def z1_symmetric_equivalence(alpha: Sequence[float], samples: Optional[int] = None, seed: int = 0,
                             pool: Optional[SamplePool] = None) -> McReport:
    """z_1 under triangular weights of size n against 2 t_{n-1,n-1} under symmetric weights with zeta = alpha_n"""
    alpha = list(alpha)
    n = len(alpha)
    if n < 2:
        raise UsageError("z_1 comparison needs n >= 2")
    samples = samples or _mc_settings()['samples']
    tri = MeasureParams(model="tri", alpha=alpha)
    sym = MeasureParams(model="sym", alpha=alpha[:-1], zeta=alpha[-1])

    z1 = sample_shapes(tri, samples, seed, pool)[:, 0]
    t_last = sample_shapes(sym, samples, seed + 1, pool)[:, 0]
    result = stats.ks_2samp(z1, 2.0 * t_last)
    threshold = _mc_settings()['ks_pvalue']
    logger.info(f"z_1 vs 2 t_(n-1,n-1), n={n}: KS={result.statistic:.4g} p={result.pvalue:.4g}")
    return McReport(experiment="z1-symmetric", seed=seed, samples=samples, params={'alpha': alpha},
                    ks=[KsResult(name=f"z1 vs 2t, n={n}", statistic=float(result.statistic),
                                 pvalue=float(result.pvalue), passed=bool(result.pvalue > threshold))])


def _entry_gamma_laws(params: MeasureParams) -> List[Tuple[str, Callable, float, float]]:
    """(label, accessor, shape, scale) with 1/w = scale * Gamma(shape)"""
    laws = []
    if params.model == "rect":
        p = min(params.n, params.m)
        for i in range(1, params.n + 1):
            for j in range(1, params.m + 1):
                scale = 1.0 / params.s if i + j == p + 1 else 1.0
                laws.append((f"w{i}{j}", lambda W, c=(i, j): W[c],
                             params.theta_hat[i - 1] + params.theta[j - 1], scale))
    elif params.model == "sym":
        for i in range(1, params.n + 1):
            for j in range(i, params.n + 1):
                if i == j:
                    laws.append((f"w{i}{i}", lambda W, c=(i, i): W[c], params.alpha[i - 1] + params.zeta, 2.0))
                else:
                    laws.append((f"w{i}{j}", lambda W, c=(i, j): W[c],
                                 params.alpha[i - 1] + params.alpha[j - 1], 1.0))
    else:
        for i in range(2, params.n + 1):
            for j in range(1, i):
                laws.append((f"w{i}{j}", lambda W, c=(i, j): W[c], params.alpha[i - 1] + params.alpha[j - 1], 1.0))
    return laws


def check_sampler_means(params: MeasureParams, samples: Optional[int] = None, seed: int = 0) -> McReport:
    """First two moments of every 1/w_ij against its Gamma law"""
    samples = samples or _mc_settings()['samples']
    rng = chunk_generator(seed, 0)
    W = SAMPLERS[params.model](params, rng, samples)
    z_threshold = _mc_settings()['z_threshold']
    report = McReport(experiment=f"sampler-{params.model}", seed=seed, samples=samples, params=params.model_dump())
    for label, entry, shape, scale in _entry_gamma_laws(params):
        inv = 1.0 / entry(W)
        mean, se = _mc_estimate(inv)
        report.probes.append(McProbe(f"E[1/{label}]", mean, se, scale * shape, z_threshold))
        mean2, se2 = _mc_estimate(inv ** 2)
        report.probes.append(McProbe(f"E[1/{label}^2]", mean2, se2, scale ** 2 * shape * (shape + 1), z_threshold))
    return report


def zeta_scaling_check(alpha: Sequence[float], zetas: Sequence[float] = (1e3, 1e4), samples: Optional[int] = None,
                       seed: int = 0, tol: float = 0.02) -> Dict:
    """zeta * w_ii concentrates at 1/2 as zeta grows"""
    samples = samples or _mc_settings()['samples']
    deviations = []
    for k, zeta in enumerate(zetas):
        params = MeasureParams(model="sym", alpha=list(alpha), zeta=zeta)
        rng = chunk_generator(seed, k)
        W = sample_sym(params, rng, samples)
        deviations.append(max(float(np.mean(np.abs(zeta * W[i, i] - 0.5))) for i in range(1, params.n + 1)))
    shrinking = all(b < a for a, b in zip(deviations, deviations[1:]))
    return {'zetas': list(zetas), 'mean_abs_deviation': deviations, 'shrinking': shrinking,
            'passed': shrinking and deviations[-1] <= tol}
