"""
Tests for the log-gamma samplers, the sample pool and the push-forward checks
"""
import numpy as np
import pytest
from pydantic import ValidationError

from app.api.models import KsResult, McProbe, McReport, MeasureParams
from app.services import polymer_mc
from app.services.sample_pool import SamplePool, chunk_generator
from app.utils.errors import UsageError

RECT = MeasureParams(model="rect", theta_hat=[1.5, 2.0], theta=[1.0, 1.2], s=1.0)
SYM = MeasureParams(model="sym", alpha=[1.0, 1.5], zeta=0.8)
TRI = MeasureParams(model="tri", alpha=[1.0, 1.5, 2.0])


class TestParams:
    def test_rect_needs_thetas(self):
        with pytest.raises(ValidationError):
            MeasureParams(model="rect", theta_hat=[1.0])

    def test_rect_region(self):
        with pytest.raises(ValidationError):
            MeasureParams(model="rect", theta_hat=[0.5], theta=[-1.0])

    def test_sym_needs_zeta(self):
        with pytest.raises(ValidationError):
            MeasureParams(model="sym", alpha=[1.0, 1.0])

    def test_alpha_pairs(self):
        with pytest.raises(ValidationError):
            MeasureParams(model="tri", alpha=[1.0, -2.0])

    def test_sizes(self):
        assert (RECT.n, RECT.m) == (2, 2)
        assert (TRI.n, TRI.m) == (3, 3)


class TestSamplers:
    def test_rect_shape(self):
        W = polymer_mc.sample_rect(RECT, chunk_generator(0, 0), 10)
        assert (W.n, W.m) == (2, 2)
        assert W[1, 1].shape == (10,)

    def test_sym_diagonal_law(self):
        W = polymer_mc.sample_sym(SYM, chunk_generator(0, 0), 40000)
        # 1/w_11 = 2 Gamma(alpha_1 + zeta)
        assert np.mean(1.0 / W[1, 1]) == pytest.approx(2 * 1.8, rel=0.03)

    def test_tri_entries(self):
        X = polymer_mc.sample_tri(TRI, chunk_generator(0, 0), 5)
        assert X.n == 3
        assert len(X.flat()) == 3

    def test_model_mismatch(self):
        with pytest.raises(UsageError):
            polymer_mc.sample_rect(SYM, chunk_generator(0, 0), 5)

    @pytest.mark.parametrize("params", [RECT, SYM, TRI])
    def test_sampler_means(self, params):
        assert polymer_mc.check_sampler_means(params, samples=20000, seed=3).passed

    def test_shape_vector_width(self):
        assert polymer_mc.sample_shapes(RECT, 100, 0).shape == (100, 2)
        assert polymer_mc.sample_shapes(TRI, 100, 0).shape == (100, 2)
        assert polymer_mc.sample_shapes(SYM, 100, 0).shape == (100, 2)


class TestSamplePool:
    def test_chunk_sizes(self):
        assert SamplePool(threads=1, chunk_size=4).chunk_sizes(10) == [4, 4, 2]

    def test_reproducible_across_threads(self):
        serial = polymer_mc.sample_shapes(RECT, 3000, 11, SamplePool(threads=1, chunk_size=1000))
        threaded = polymer_mc.sample_shapes(RECT, 3000, 11, SamplePool(threads=4, chunk_size=1000,
                                                                       parallel_threshold=1))
        np.testing.assert_array_equal(serial, threaded)

    def test_seed_changes_draws(self):
        a = polymer_mc.sample_shapes(RECT, 100, 1)
        b = polymer_mc.sample_shapes(RECT, 100, 2)
        assert not np.array_equal(a, b)


class TestPushforward:
    def test_rect_single_entry(self):
        params = MeasureParams(model="rect", theta_hat=[1.5], theta=[1.0], s=2.0)
        report = polymer_mc.pushforward_check(params, samples=20000, seed=5)
        assert report.passed
        assert report.probes[0].reference == pytest.approx(1.0, rel=1e-6)

    @pytest.mark.slow
    def test_rect_square(self):
        assert polymer_mc.pushforward_check(RECT, samples=50000, seed=5).passed

    @pytest.mark.slow
    def test_rect_wide(self):
        params = MeasureParams(model="rect", theta_hat=[1.5, 2.0], theta=[1.0, 1.2, 1.4], s=1.5)
        assert polymer_mc.pushforward_check(params, samples=50000, seed=5).passed

    @pytest.mark.slow
    def test_sym(self):
        assert polymer_mc.pushforward_check(SYM, samples=50000, seed=5).passed

    def test_tri_two(self):
        params = MeasureParams(model="tri", alpha=[1.0, 1.5])
        assert polymer_mc.pushforward_check(params, samples=20000, seed=5).passed

    @pytest.mark.slow
    def test_tri_three(self):
        assert polymer_mc.pushforward_check(TRI, samples=50000, seed=5).passed

    def test_rect_size_limit(self):
        params = MeasureParams(model="rect", theta_hat=[1.0] * 3, theta=[1.0] * 3)
        with pytest.raises(UsageError):
            polymer_mc.pushforward_check(params, samples=10)

    def test_sym_size_limit(self):
        params = MeasureParams(model="sym", alpha=[1.0] * 3, zeta=1.0)
        with pytest.raises(UsageError):
            polymer_mc.pushforward_check(params, samples=10)


class TestDistributionalIdentities:
    def test_z1_matches_symmetric_corner(self):
        report = polymer_mc.z1_symmetric_equivalence([1.0, 1.5], samples=20000, seed=2)
        assert report.passed
        assert report.ks[0].name == "z1 vs 2t, n=2"

    def test_z1_needs_two(self):
        with pytest.raises(UsageError):
            polymer_mc.z1_symmetric_equivalence([1.0])

    def test_zeta_scaling(self):
        result = polymer_mc.zeta_scaling_check([1.0, 1.5], samples=20000)
        assert result['shrinking']
        assert result['passed']


def test_probes():
    name, g = polymer_mc.power_probe([0.5, 0.0])
    assert name == "E[x1^-0.5]"
    np.testing.assert_allclose(g(np.array([[4.0, 1.0]])), [0.5])
    name, g = polymer_mc.laplace_probe(2.0, 1)
    assert name == "E[exp(-2 x2)]"
    assert len(polymer_mc.standard_probes(2)) == 6


def test_report_keeps_z_threshold():
    row = McProbe("E[x1^-0.5]", estimate=1.0, stderr=0.1, reference=1.25, z_threshold=2.0)
    report = McReport("pushforward", seed=1, samples=100, probes=[row],
                      ks=[KsResult("x1", statistic=0.01, pvalue=0.9, passed=True)])
    assert not report.passed
    again = McReport.from_dict(report.to_dict())
    assert again.probes[0].z_threshold == 2.0
    assert not again.passed
    assert again.to_dict() == report.to_dict()
