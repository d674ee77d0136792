"""
Verification suites.

Each suite draws random inputs from a seeded generator, runs the identities of
one module and collects the outcomes in a CheckReport. Exact identities are
checked over Fraction inputs; analytic and statistical ones over floats.
"""
import logging
import random
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from app.api.models import CheckReport, MeasureParams, Pattern, SymmetricWeightMatrix, TriangularArray, WeightMatrix
from app.config.settings import config
from app.services import grsk_core, grsk_symmetric, grsk_triangular, polymer_mc, tropical_rsk, whittaker_eval
from app.utils.errors import GrskError, UsageError

logger = logging.getLogger(__name__)

CheckFn = Callable[[], Tuple[bool, Dict[str, Any]]]


def random_rational(rng: random.Random, limit: int = 9) -> Fraction:
    return Fraction(rng.randint(1, limit), rng.randint(1, limit))


def random_matrix(rng: random.Random, n: int, m: int) -> WeightMatrix:
    return WeightMatrix([[random_rational(rng) for _ in range(m)] for _ in range(n)])


def random_symmetric(rng: random.Random, n: int) -> SymmetricWeightMatrix:
    return SymmetricWeightMatrix(n, [random_rational(rng) for _ in range(n * (n + 1) // 2)])


def random_triangular(rng: random.Random, n: int) -> TriangularArray:
    return TriangularArray.from_flat([random_rational(rng) for _ in range(n * (n - 1) // 2)], n)


def random_triangle_pattern(rng: random.Random, n: int) -> Pattern:
    return Pattern([[random_rational(rng) for _ in range(i)] for i in range(1, n + 1)], width=n)


def _run(report: CheckReport, name: str, check: CheckFn) -> None:
    try:
        passed, detail = check()
    except GrskError as e:
        logger.error(f"Check '{name}' raised {type(e).__name__}: {e}")
        passed, detail = False, {'error': str(e)}
    except ZeroDivisionError as e:
        logger.error(f"Check '{name}' divided by zero: {e}")
        passed, detail = False, {'error': str(e)}
    report.add(name, passed, **detail)


def _all_trials(cases: List[Any], predicate: Callable[[Any], bool]) -> Tuple[bool, Dict[str, Any]]:
    failures = [k for k, case in enumerate(cases) if not predicate(case)]
    return not failures, {'cases': len(cases), 'failed_cases': failures[:10]}


def _settings() -> Dict[str, Any]:
    return config.get_verification_config()


# ---------------------------------------------------------------------------
# exact suites

def core_suite(trials: int, seed: int, **_) -> CheckReport:
    rng = random.Random(seed)
    max_size = int(_settings().get('max_rect_size', 4))
    report = CheckReport(suite="core", seed=seed, trials=trials)

    matrices = [random_matrix(rng, rng.randint(1, 5), rng.randint(1, 5)) for _ in range(trials)]
    small = [random_matrix(rng, rng.randint(1, max_size), rng.randint(1, max_size)) for _ in range(trials)]
    s_values = [random_rational(rng) for _ in range(trials)]

    _run(report, "fundamental identity", lambda: _all_trials(
        list(zip(matrices, s_values)), lambda c: grsk_core.check_fundamental_identity(*c)))
    _run(report, "energy splits over (P, Q)", lambda: _all_trials(
        list(zip(matrices, s_values)), lambda c: grsk_core.check_energy_split(*c)))
    _run(report, "inverse map", lambda: _all_trials(
        matrices, lambda W: grsk_core.invert_grsk(grsk_core.apply_grsk(W)) == W))
    _run(report, "insertion agrees with local moves", lambda: _all_trials(
        matrices, lambda W: grsk_core.noumi_yamada_patterns(W) == grsk_core.patterns_from_matrix(
            grsk_core.apply_grsk(W))))

    def round_trip(W: WeightMatrix) -> bool:
        pair = grsk_core.patterns_from_matrix(W)
        return grsk_core.matrix_from_patterns(pair.P, pair.Q) == W

    _run(report, "patterns round trip", lambda: _all_trials(matrices, round_trip))
    _run(report, "t11 identity", lambda: _all_trials(small, grsk_core.check_t11_identity))
    _run(report, "transpose symmetry", lambda: _all_trials(small, grsk_core.transpose_symmetry_check))
    _run(report, "path partition functions", lambda: _all_trials(small, grsk_core.check_path_identity))

    exponents = [([rng.randint(-2, 2) for _ in range(W.n)], [rng.randint(-2, 2) for _ in range(W.m)]) for W in small]
    _run(report, "volume form", lambda: _all_trials(
        list(zip(small, s_values, exponents)), lambda c: grsk_core.check_volume_form(c[0], c[1], *c[2])))
    _run(report, "grsk jacobian is +-1", lambda: _all_trials(
        small, lambda W: grsk_core.log_jacobian_det('grsk', W) in (1, -1)))
    _run(report, "local move jacobian is +-1", lambda: _all_trials(
        small, lambda W: grsk_core.log_jacobian_det('local_move', W, i=W.n, j=W.m) in (1, -1)))

    def bender_knuth_case(W: WeightMatrix) -> bool:
        corners = {(1, 1), (W.n, W.m)}
        for i in range(1, W.n + 1):
            for j in range(1, W.m + 1):
                X = grsk_core.bender_knuth(W, i, j)
                if grsk_core.bender_knuth(X, i, j) != W:
                    return False
                if grsk_core.closed_energy(X) != grsk_core.closed_energy(W):
                    return False
                if (i, j) not in corners and grsk_core.energy(X, 0) != grsk_core.energy(W, 0):
                    return False
        return True

    _run(report, "Bender-Knuth involutions preserve the energy", lambda: _all_trials(small, bender_knuth_case))
    _run(report, "rho factorisation", lambda: _all_trials(small, grsk_core.check_rho_factorisation))

    triangles = [random_triangle_pattern(rng, 4) for _ in range(max(1, trials // 10))]
    _run(report, "braid relations at n=4", lambda: _all_trials(
        triangles, lambda P: grsk_core.braid_check(P, 1) and grsk_core.braid_check(P, 2)))
    return report


def sym_suite(trials: int, seed: int, **_) -> CheckReport:
    rng = random.Random(seed)
    max_size = int(_settings().get('max_sym_size', 4))
    report = CheckReport(suite="sym", seed=seed, trials=trials)
    cases = [random_symmetric(rng, rng.randint(1, max_size)) for _ in range(trials)]

    _run(report, "recursion agrees with the restricted map", lambda: _all_trials(
        cases, lambda W: grsk_symmetric.apply_grsk_symmetric_recursive(W) == grsk_symmetric.apply_grsk_symmetric(W)))
    _run(report, "diagonal product identity", lambda: _all_trials(cases, grsk_symmetric.diagonal_product_identity))
    _run(report, "P equals Q", lambda: _all_trials(cases, grsk_symmetric.check_symmetric_patterns))
    _run(report, "symmetric jacobian is +-1", lambda: _all_trials(
        cases, lambda W: grsk_symmetric.log_jacobian_det_symmetric(W) in (1, -1)))
    return report


def tri_suite(trials: int, seed: int, **_) -> CheckReport:
    rng = random.Random(seed)
    max_size = int(_settings().get('max_tri_size', 5))
    eps_list = tuple(_settings().get('eps_list', [1e-8, 1e-9, 1e-10]))
    report = CheckReport(suite="tri", seed=seed, trials=trials)
    cases = [random_triangular(rng, rng.randint(2, max_size)) for _ in range(trials)]
    oracle_cases = [random_triangular(rng, rng.randint(2, 8)) for _ in range(max(1, trials // 4))]

    _run(report, "triangular energy identity", lambda: _all_trials(cases, grsk_triangular.check_triangular_identity))
    _run(report, "triangular jacobian is +-1", lambda: _all_trials(
        cases, lambda W: grsk_triangular.log_jacobian_det_triangular(W) in (1, -1)))
    _run(report, "shape ratios are below-wall partition functions", lambda: _all_trials(
        oracle_cases, grsk_triangular.check_shape_ratios))
    _run(report, "type formula", lambda: _all_trials(cases, grsk_triangular.check_type_formula))

    embedded = [W for W in cases if W.n <= 4]

    def embedding(W: TriangularArray) -> bool:
        result = grsk_triangular.epsilon_embedding_check(W, eps_list)
        return result['passed']

    def wall_paths(W: TriangularArray) -> bool:
        # relative corrections are O(eps)
        return grsk_triangular.check_wall_path_structure(W, 1e-8)['max_error'] < 1e-3

    _run(report, "epsilon embedding collapses to the triangular map", lambda: _all_trials(embedded, embedding))
    _run(report, "wall path sums", lambda: _all_trials(embedded, wall_paths))
    return report


def tropical_suite(trials: int, seed: int, **_) -> CheckReport:
    rng = random.Random(seed)
    report = CheckReport(suite="tropical", seed=seed, trials=trials)
    cases = [WeightMatrix([[rng.randint(-5, 9) for _ in range(m)] for _ in range(n)])
             for n, m in ((rng.randint(1, 4), rng.randint(1, 4)) for _ in range(trials))]

    _run(report, "tropical inverse", lambda: _all_trials(
        cases, lambda Y: tropical_rsk.invert_tropical(tropical_rsk.apply_tropical(Y)) == Y))
    _run(report, "last passage (Greene)", lambda: _all_trials(cases, tropical_rsk.check_greene))
    _run(report, "tropical energy identity", lambda: _all_trials(
        cases, lambda Y: tropical_rsk.check_tropical_energy_identity(Y, sigma=rng.randint(-3, 3))))

    signed = [WeightMatrix([[rng.randint(0, 9) for _ in range(3)] for _ in range(3)]) for _ in range(trials * 5)]
    signed += [WeightMatrix([[rng.randint(-9, 9) for _ in range(3)] for _ in range(3)]) for _ in range(trials * 5)]
    _run(report, "Gelfand-Tsetlin exactly for nonnegative input", lambda: _all_trials(
        signed, tropical_rsk.gt_membership_check))

    limits = [WeightMatrix([[rng.randint(-5, 5) for _ in range(3)] for _ in range(3)]) for _ in range(trials)]

    def limit_case(Y: WeightMatrix) -> bool:
        result = tropical_rsk.tropicalization_limit_check(Y)
        return result['monotone'] and result['errors'][-1] < 0.05

    _run(report, "tropicalization limit", lambda: _all_trials(limits, limit_case))

    def cauchy() -> Tuple[bool, Dict[str, Any]]:
        results = [tropical_rsk.tropical_cauchy_check([1.0], [0.5]),
                   tropical_rsk.tropical_cauchy_check([1.0, 2.0], [0.5, 1.5])]
        return all(r['passed'] for r in results), {'rel_errors': [r['rel_error'] for r in results]}

    _run(report, "zero-temperature Cauchy identity", cauchy)
    return report


# ---------------------------------------------------------------------------
# numerical suites

def _draw(gen: np.random.Generator, size: int) -> List[float]:
    # parameters in [0.5, 1.5] keep every pairwise sum >= 1
    return [float(v) for v in gen.uniform(0.5, 1.5, size)]


def random_stade_params(kind: str, size: int, gen: np.random.Generator) -> Dict[str, Any]:
    """Admissible parameters for one identity check; ``size`` is n, or m for the rectangular kind"""
    kind = whittaker_eval.STADE_KINDS.get(kind, kind)
    if kind == 'square':
        return {'nu': _draw(gen, size), 'lam': _draw(gen, size)}
    if kind == 'rectangular':
        return {'nu': _draw(gen, size + 1), 'lam': _draw(gen, size)}
    return {'lam': _draw(gen, size), 'gamma': _draw(gen, 1)[0]}


def whittaker_suite(trials: int, seed: int, tol: Optional[float] = None, **_) -> CheckReport:
    gen = np.random.default_rng(seed)
    report = CheckReport(suite="whittaker", seed=seed, trials=trials)
    draws = max(1, min(trials, 10))

    def identities() -> Tuple[bool, Dict[str, Any]]:
        results = [whittaker_eval.elementary_identity_checks(1, [0.7], [1.3]),
                   whittaker_eval.elementary_identity_checks(2, [0.3, -0.1], [0.8, 1.7]),
                   whittaker_eval.elementary_identity_checks(3, [0.2, 0.5, -0.4], [0.9, 1.1, 1.6], tol=1e-5)]
        return all(r['passed'] for r in results), {'worst': max(max(r['homogeneity'], r['shift'], r['reflection'])
                                                               for r in results)}

    def bessel() -> Tuple[bool, Dict[str, Any]]:
        result = whittaker_eval.check_psi_bessel_grid()
        return result['passed'], {k: v for k, v in result.items() if k != 'passed'}

    def symmetry() -> Tuple[bool, Dict[str, Any]]:
        results = [whittaker_eval.check_psi_symmetry([0.4, -0.3], [0.7, 1.9]),
                   whittaker_eval.check_psi_symmetry([0.4, -0.3, 0.1], [0.7, 1.2, 1.9])]
        return all(r['passed'] for r in results), {'spreads': [r['max_rel_spread'] for r in results]}

    def consistency() -> Tuple[bool, Dict[str, Any]]:
        result = whittaker_eval.check_self_consistency(2, [0.3, 0.6], [1.0, 2.0])
        return result['passed'], {'change': result['change'], 'error_estimate': result['error_estimate']}

    def s_symmetry() -> Tuple[bool, Dict[str, Any]]:
        results = [whittaker_eval.check_psi_s_symmetry(1, [0.3, 0.8], 1.0, [1.5]),
                   whittaker_eval.check_psi_s_symmetry(2, [0.3, 0.5, 0.8], 1.0, [1.5, 0.7])]
        return all(r['passed'] for r in results), {'rel_errors': [r['rel_error'] for r in results]}

    def pattern_mc() -> Tuple[bool, Dict[str, Any]]:
        cases = [(1, 1, [0.4], 1.0, [1.2]), (1, 2, [0.4, 0.7], 1.0, [1.2]),
                 (2, 2, [0.4, 0.7], 1.0, [1.2, 0.8]), (2, 3, [0.4, 0.7, 0.5], 1.0, [1.2, 0.8])]
        results = [whittaker_eval.check_pattern_mc(*c, samples=20000, seed=seed + k) for k, c in enumerate(cases)]
        return all(r['passed'] for r in results), {'cases': len(results)}

    _run(report, "elementary identities", identities)
    _run(report, "n=2 Bessel relation", bessel)
    _run(report, "lambda permutation symmetry", symmetry)
    _run(report, "refinement self-consistency", consistency)
    _run(report, "Psi_{lambda;s} swap symmetry", s_symmetry)
    _run(report, "pattern integral by Monte Carlo", pattern_mc)

    def stade(kind: str, size: int, count: int, random_s: bool) -> Tuple[bool, Dict[str, Any]]:
        results = []
        for _ in range(count):
            params = random_stade_params(kind, size, gen)
            if random_s:
                params['s'] = float(gen.uniform(0.5, 2))
            results.append(whittaker_eval.stade_identity_check(kind, tol=tol, **params))
        return all(r['passed'] for r in results), {'worst_rel_error': max(r['rel_error'] for r in results),
                                                   'draws': count}

    _run(report, "square identity n=2", lambda: stade('square', 2, draws, True))
    _run(report, "square identity n=3", lambda: stade('square', 3, draws, False))
    _run(report, "rectangular identity m=1", lambda: stade('rect', 1, draws, True))
    _run(report, "rectangular identity m=2", lambda: stade('rect', 2, draws, False))
    _run(report, "Bump-Friedberg identity n=2", lambda: stade('bump-friedberg', 2, draws, True))
    _run(report, "Bump-Friedberg identity n=3", lambda: stade('bump-friedberg', 3, draws, False))
    return report


def polymer_suite(trials: int, seed: int, samples: Optional[int] = None, **_) -> CheckReport:
    gen = np.random.default_rng(seed)
    samples = samples or int(config.get_monte_carlo_config().get('samples', 100000))
    report = CheckReport(suite="polymer", seed=seed, trials=trials)

    models = [
        MeasureParams(model="rect", theta_hat=_draw(gen, 2), theta=_draw(gen, 2), s=float(gen.uniform(0.5, 2))),
        MeasureParams(model="sym", alpha=_draw(gen, 2), zeta=_draw(gen, 1)[0]),
        MeasureParams(model="tri", alpha=_draw(gen, 3)),
    ]

    for k, params in enumerate(models):
        def means(params=params, k=k) -> Tuple[bool, Dict[str, Any]]:
            mc = polymer_mc.check_sampler_means(params, samples, seed + k)
            return mc.passed, {'max_abs_z': max(abs(p.z) for p in mc.probes)}

        def pushforward(params=params, k=k) -> Tuple[bool, Dict[str, Any]]:
            mc = polymer_mc.pushforward_check(params, samples=samples, seed=seed + 10 + k)
            return mc.passed, {'probes': {p.probe: round(p.z, 3) for p in mc.probes}}

        _run(report, f"{params.model} sampler moments", means)
        _run(report, f"{params.model} push-forward law", pushforward)

    for n in (2, 3, 4):
        def z1(n=n) -> Tuple[bool, Dict[str, Any]]:
            mc = polymer_mc.z1_symmetric_equivalence(_draw(gen, n), samples, seed + 20 + n)
            return mc.passed, {'pvalue': mc.ks[0].pvalue}

        _run(report, f"z_1 law equals 2 t_(n-1,n-1), n={n}", z1)

    def zeta() -> Tuple[bool, Dict[str, Any]]:
        result = polymer_mc.zeta_scaling_check(_draw(gen, 2), samples=samples, seed=seed + 30)
        return result['passed'], {'deviations': result['mean_abs_deviation']}

    def laguerre() -> Tuple[bool, Dict[str, Any]]:
        result = tropical_rsk.laguerre_marginal_check(_draw(gen, 2), _draw(gen, 2), samples, seed + 40)
        return result['passed'], {'ks_statistic': result['ks_statistic'], 'z': result['z']}

    _run(report, "zeta scaling of the diagonal", zeta)
    _run(report, "exponential last passage against the Laguerre marginal", laguerre)
    return report


SUITES = {
    'core': core_suite,
    'sym': sym_suite,
    'tri': tri_suite,
    'tropical': tropical_suite,
    'whittaker': whittaker_suite,
    'polymer': polymer_suite,
}


def run_suite(name: str, trials: Optional[int] = None, seed: Optional[int] = None, tol: Optional[float] = None,
              samples: Optional[int] = None) -> CheckReport:
    if name not in SUITES:
        raise UsageError(f"Unknown suite '{name}'; expected one of {', '.join(SUITES)}")
    settings = _settings()
    trials = trials if trials is not None else int(settings.get('trials', 20))
    seed = seed if seed is not None else int(settings.get('seed', 7))
    logger.info(f"Running suite '{name}' with trials={trials} seed={seed}")
    report = SUITES[name](trials, seed, tol=tol, samples=samples)
    failed = [c.name for c in report.checks if not c.passed]
    if failed:
        logger.warning(f"Suite '{name}': {len(failed)} failed check(s): {', '.join(failed)}")
    else:
        logger.info(f"Suite '{name}': all {len(report.checks)} checks passed")
    return report

