"""
Tests for exact scalar arithmetic, lattice paths and quadrature helpers
"""
import math
from fractions import Fraction

import numpy as np
import pytest

from app.api.models import QuadratureSpec
from app.utils.errors import DomainError, UsageError
from app.utils.exact_numerics import (LogFloat, det_exact, dual_seed, format_rational, format_scalar,
                                      log_jacobian_from_duals, parse_rational, parse_scalar, pos_rational)
from app.utils.lattice_paths import PathEnumerator
from app.utils.quadrature import (integrate_over_log_space, lattice_integrate, step_size, tanh_sinh_rule,
                                  tolerance_spec, trapezoid_rule)


class TestRationals:
    def test_parse_forms(self):
        assert parse_rational("6/4") == Fraction(3, 2)
        assert parse_rational("7") == 7
        assert parse_rational(5) == 5
        assert parse_rational("0.25") == Fraction(1, 4)

    def test_float_is_refused(self):
        with pytest.raises(DomainError):
            parse_rational(0.5)

    def test_garbage_is_refused(self):
        with pytest.raises(DomainError):
            parse_rational("one half")

    def test_positivity(self):
        with pytest.raises(DomainError):
            pos_rational("0")
        with pytest.raises(DomainError):
            pos_rational("-1/2")
        assert pos_rational("1/2") == Fraction(1, 2)

    def test_lowest_terms(self):
        assert format_rational(Fraction(10, 4)) == "5/2"
        assert format_rational(Fraction(4, 2)) == "2"

    def test_scalar_formatting(self):
        assert format_scalar(Fraction(6, 5)) == "6/5"
        assert format_scalar(0.1) == "0.10000000000000001"
        assert parse_scalar(0.5) == 0.5
        assert parse_scalar("1/3") == Fraction(1, 3)

    @pytest.mark.parametrize("value", [math.inf, -math.inf, math.nan, float("1e400")])
    def test_non_finite_float_is_refused(self, value):
        with pytest.raises(DomainError):
            parse_scalar(value)


class TestDualRational:
    def test_product(self):
        x0, x1 = dual_seed([3, 5])
        y = x0 * x1
        assert y.value == 15
        assert y.partials == (5, 3)

    def test_quotient(self):
        x0, x1 = dual_seed([1, 1])
        y = x0 / (x0 + x1)
        assert y.value == Fraction(1, 2)
        assert y.partials == (Fraction(1, 4), Fraction(-1, 4))

    def test_reciprocal_and_power(self):
        (x,) = dual_seed([2])
        assert (1 / x).partials == (Fraction(-1, 4),)
        assert (x ** 3).partials == (12,)

    def test_width_mismatch(self):
        (a,) = dual_seed([2])
        b, _ = dual_seed([2, 3])
        with pytest.raises(UsageError):
            a + b

    def test_seed_requires_positive(self):
        with pytest.raises(DomainError):
            dual_seed([1, 0])


class TestDeterminant:
    def test_needs_pivot(self):
        assert det_exact([[0, 1], [1, 0]]) == -1

    def test_unimodular(self):
        assert det_exact([["2", "1"], ["1", "1"]]) == 1

    def test_singular(self):
        assert det_exact([[1, 2], [2, 4]]) == 0

    def test_not_square(self):
        with pytest.raises(UsageError):
            det_exact([[1, 2]])

    def test_log_jacobian_of_product_map(self):
        # (x, y) -> (x, xy) has log-Jacobian [[1, 0], [1, 1]]
        values = [Fraction(2), Fraction(3)]
        x, y = dual_seed(values)
        assert log_jacobian_from_duals(values, [x, x * y]) == 1


def test_logfloat_arithmetic():
    a = LogFloat.from_value(2.0)
    b = LogFloat.from_value(3.0)
    assert math.isclose(math.exp((a + b).log), 5.0)
    assert math.isclose(math.exp((a * b).log), 6.0)
    assert math.isclose(math.exp((1 / a).log), 0.5)


class TestPathEnumerator:
    def test_binomial_count(self):
        assert len(PathEnumerator().paths((1, 1), (3, 3))) == 6

    def test_non_intersecting_pairs(self):
        pairs = [((1, 1), (2, 1)), ((1, 2), (2, 2))]
        assert len(list(PathEnumerator().non_intersecting(pairs))) == 1

    def test_restricted_region(self):
        below = PathEnumerator(allowed=lambda i, j: j < i)
        assert len(below.paths((2, 1), (4, 3))) == 2


class TestQuadrature:
    @pytest.mark.parametrize("rule", [trapezoid_rule, tanh_sinh_rule])
    def test_rules_integrate_gaussian(self, rule):
        nodes, weights = rule(np.array([-8.0]), np.array([8.0]), 65)
        value = np.sum(weights[0] * np.exp(-nodes[0] ** 2))
        assert value == pytest.approx(math.sqrt(math.pi), rel=1e-10)

    def test_log_space_gamma_integral(self):
        # int_0^inf x^2 e^{-x} dx/x = Gamma(2), as an integral over u = log x
        value, error = integrate_over_log_space(lambda U: np.exp(2 * U[:, 0] - np.exp(U[:, 0])), 1, QuadratureSpec())
        assert abs(value - 1.0) < 1e-8
        assert error < 1e-4

    def test_vanishing_integrand(self):
        with pytest.raises(DomainError):
            integrate_over_log_space(lambda U: np.zeros(U.shape[0]), 2, QuadratureSpec())

    def test_lattice_gaussian_per_row(self):
        U = np.array([[0.0, 0.0], [0.13, -2.4], [3.7, 1.1]])
        value = lattice_integrate(U, U - 8.0, U + 8.0, lambda u, v: -np.sum((v - u) ** 2, axis=-1),
                                  lambda V: np.ones(V.shape[0]), QuadratureSpec())
        np.testing.assert_allclose(value.real, math.pi, rtol=1e-10)

    def test_lattice_evaluates_inner_once(self):
        calls = []

        def inner(V):
            calls.append(V.shape[0])
            return np.exp(-V[:, 0] ** 2)

        spec = QuadratureSpec()
        U = np.array([[-1.0], [0.0], [0.7]])
        value = lattice_integrate(U, U - 9.0, U + 9.0, lambda u, v: -np.sum((v - u) ** 2, axis=-1), inner, spec)
        np.testing.assert_allclose(value.real, math.sqrt(math.pi / 2) * np.exp(-U[:, 0] ** 2 / 2), rtol=1e-10)
        assert len(calls) == 1
        # nodes sit on multiples of the step
        assert calls[0] <= int(20.0 / step_size(spec)) + 3

    def test_tolerance_spec(self):
        spec = QuadratureSpec(points=32)
        loose, tight = tolerance_spec(spec, 1e-3), tolerance_spec(spec, 1e-8)
        assert loose.points == 16
        assert loose.points < tight.points <= spec.points
        assert tolerance_spec(spec, 1e-12).points == spec.points
        assert tolerance_spec(QuadratureSpec(points=16), 1e-10).points == 16
