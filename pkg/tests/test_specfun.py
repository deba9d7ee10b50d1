"""
Tests for the Mittag-Leffler evaluator and the stable densities.

Closed forms used as oracles:
- E_1(−x) = e^{−x}, E_{1/2}(−x) = erfcx(x)
- D(1) for β = 1/2 is Lévy: density e^{−1/(4u)} / (2√π u^{3/2}), CDF erfc(1/(2√u))
- E^{1/2}(1) and |B(1)| are half-normal with variance 2
"""
import math

import numpy as np
import pytest
from scipy import integrate, special

from app.exceptions import ParameterError
from app.specfun import (
    alpha_stable_abs_median,
    alpha_stable_cdf_1d,
    alpha_stable_density_1d,
    inverse_stable_cdf,
    inverse_stable_density,
    inverse_stable_median,
    iterated_bm_density,
    kanter_a,
    mittag_leffler,
    mittag_leffler_series_mp,
    mode_profile,
    stable_cdf,
    stable_density,
    stable_sf,
)


HALF_NORMAL_MEDIAN = 2.0 * special.erfinv(0.5)


class TestMittagLeffler:
    """Double-precision evaluator against closed forms and the extended-precision series."""

    def test_half_order_benchmark(self):
        """E_{1/2}(−1) ≈ 0.4275836."""
        expected = float(mittag_leffler_series_mp(0.5, 1.0, 1.0))
        assert abs(mittag_leffler(0.5, 1.0) - expected) < 1e-12
        assert abs(expected - 0.4275836) < 1e-7

    def test_order_one_is_exponential(self):
        x = np.array([0.0, 0.3, 2.0, 40.0])
        np.testing.assert_allclose(mittag_leffler(1.0, x), np.exp(-x), rtol=1e-15)

    def test_at_zero(self):
        for beta in (0.2, 0.5, 0.75, 1.0):
            assert mittag_leffler(beta, 0.0) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("beta", [0.3, 0.7, 0.9])
    @pytest.mark.parametrize("x", [0.5, 1.5, 2.0])
    def test_matches_extended_precision_series(self, beta, x):
        expected = float(mittag_leffler_series_mp(beta, x, 1.0))
        assert abs(mittag_leffler(beta, x) - expected) < 1e-10

    def test_asymptotic_region(self):
        beta, x = 0.6, 1e7
        leading = 1.0 / (x * math.gamma(1.0 - beta))
        assert mittag_leffler(beta, x) == pytest.approx(leading, rel=1e-6)

    @pytest.mark.parametrize("beta", [0.3, 0.6, 0.9])
    def test_leading_asymptotics_at_region_edge(self, beta):
        """x E_β(−x) → 1/Γ(1−β); at x = 1e6 the integral branch is already within 2%."""
        x = 1e6
        assert x * mittag_leffler(beta, x) == pytest.approx(1.0 / math.gamma(1.0 - beta), rel=0.02)

    @pytest.mark.parametrize("beta", [0.3, 0.6, 0.9])
    @pytest.mark.parametrize("edge", [1.0, 1e6])
    def test_continuous_across_evaluation_regions(self, beta, edge):
        below = mittag_leffler(beta, edge)
        above = mittag_leffler(beta, float(np.nextafter(edge, np.inf)))
        assert abs(below - above) < 1e-12
        assert above == pytest.approx(below, rel=1e-7)

    @pytest.mark.parametrize("beta", [0.3, 0.7, 0.9])
    def test_decreasing_through_every_region(self, beta):
        x = np.geomspace(1e-3, 1e8, 60)
        values = mittag_leffler(beta, x)
        assert np.all(np.diff(values) < 0)
        assert np.all(values > 0)

    def test_scalar_and_array_shapes(self):
        assert isinstance(mittag_leffler(0.4, 1.0), float)
        values = mittag_leffler(0.4, np.array([0.1, 1.0, 5.0]))
        assert values.shape == (3,)
        assert np.all(np.diff(values) < 0)

    def test_negative_argument_rejected(self):
        with pytest.raises(ParameterError):
            mittag_leffler(0.5, -1.0)

    def test_order_out_of_range_rejected(self):
        with pytest.raises(ParameterError):
            mittag_leffler(1.5, 1.0)

    def test_mode_profile(self):
        assert mode_profile(0.5, 4.0, 1.0) == pytest.approx(special.erfcx(4.0), rel=1e-14)

    def test_series_derivative(self):
        """d/dt E_{1/2}(−√t) at t=1 against a central difference of erfcx."""
        h = 1e-5
        fd = (special.erfcx(math.sqrt(1.0 + h)) - special.erfcx(math.sqrt(1.0 - h))) / (2.0 * h)
        derivative = float(mittag_leffler_series_mp(0.5, 1.0, 1.0, derivative=True))
        assert derivative == pytest.approx(fd, abs=1e-8)


class TestStableLaw:
    def test_kanter_function(self):
        """For β = 1/2, A(u) = 1/(4 cos²(πu/2))."""
        u = np.array([0.0, 0.25, 0.5, 0.75])
        np.testing.assert_allclose(kanter_a(0.5, u), 1.0 / (4.0 * np.cos(np.pi * u / 2) ** 2), rtol=1e-12)

    @pytest.mark.parametrize("u", [0.05, 0.4, 3.0, 50.0])
    def test_levy_density(self, u):
        expected = math.exp(-1.0 / (4.0 * u)) / (2.0 * math.sqrt(math.pi) * u ** 1.5)
        assert stable_density(0.5, u) == pytest.approx(expected, rel=1e-12)
        assert stable_cdf(0.5, u) == pytest.approx(special.erfc(0.5 / math.sqrt(u)), abs=1e-14)

    @pytest.mark.parametrize("beta", [0.3, 0.7])
    def test_cdf_integrates_density(self, beta):
        a, b = 0.5, 4.0
        mass, _ = integrate.quad(lambda u: stable_density(beta, u), a, b, epsabs=1e-12)
        assert stable_cdf(beta, b) - stable_cdf(beta, a) == pytest.approx(mass, abs=1e-8)

    @pytest.mark.parametrize("beta", [0.3, 0.7])
    def test_cdf_and_sf_complement(self, beta):
        for u in (0.2, 1.0, 30.0):
            assert stable_cdf(beta, u) + stable_sf(beta, u) == pytest.approx(1.0, abs=1e-10)

    def test_laplace_transform(self):
        beta, s = 0.7, 1.0
        head, _ = integrate.quad(lambda u: math.exp(-s * u) * stable_density(beta, u), 0.0, 1.0, epsabs=1e-12)
        tail, _ = integrate.quad(lambda u: math.exp(-s * u) * stable_density(beta, u), 1.0, np.inf, epsabs=1e-12)
        assert head + tail == pytest.approx(math.exp(-s ** beta), abs=1e-7)

    @pytest.mark.parametrize("beta", [0.3, 0.5, 0.7])
    def test_density_is_unimodal(self, beta):
        u = np.geomspace(0.05, 50.0, 120)
        g = np.array([stable_density(beta, v) for v in u])
        significant = g > 1e-4 * g.max()
        g = g[significant]
        peak = int(np.argmax(g))
        assert np.all(np.diff(g[: peak + 1]) >= 0)
        assert np.all(np.diff(g[peak:]) <= 0)

    def test_nonpositive_argument_rejected(self):
        with pytest.raises(ParameterError):
            stable_density(0.5, 0.0)


class TestInverseStableLaw:
    @pytest.mark.parametrize("x", [0.3, 1.0, 2.5])
    def test_half_order_is_half_normal(self, x):
        assert inverse_stable_density(0.5, 1.0, x) == pytest.approx(math.exp(-x * x / 4.0) / math.sqrt(math.pi),
                                                                    abs=1e-10)
        assert inverse_stable_cdf(0.5, 1.0, x) == pytest.approx(special.erf(x / 2.0), abs=1e-12)

    def test_median(self):
        assert inverse_stable_median(0.5, 1.0) == pytest.approx(HALF_NORMAL_MEDIAN, abs=1e-8)
        assert inverse_stable_median(0.5, 4.0) == pytest.approx(2.0 * HALF_NORMAL_MEDIAN, abs=1e-8)

    def test_self_similarity(self):
        """E^β(t) has the law of t^β E^β(1)."""
        beta, t, x = 0.3, 2.0, 0.8
        scaled = inverse_stable_density(beta, 1.0, x / t ** beta) / t ** beta
        assert inverse_stable_density(beta, t, x) == pytest.approx(scaled, rel=1e-8)

    @pytest.mark.parametrize("beta", [0.3, 0.5, 0.7])
    def test_density_has_unit_mass(self, beta):
        head, _ = integrate.quad(lambda x: inverse_stable_density(beta, 1.0, x), 0.0, 1.0, epsabs=1e-12, limit=200)
        tail, _ = integrate.quad(lambda x: inverse_stable_density(beta, 1.0, x), 1.0, np.inf, epsabs=1e-12, limit=200)
        assert abs(head + tail - 1.0) < 1e-8

    def test_iterated_brownian_density_matches(self):
        """|I_2(1)| and E^{1/4}(1) share one density."""
        for x in (0.5, 1.0):
            assert iterated_bm_density(2, 1.0, x) == pytest.approx(inverse_stable_density(0.25, 1.0, x), abs=1e-6)

    def test_iterated_depth_one(self):
        assert iterated_bm_density(1, 1.0, 0.7) == pytest.approx(math.exp(-0.49 / 4.0) / math.sqrt(math.pi),
                                                                 rel=1e-14)

    def test_iterated_depth_limited(self):
        with pytest.raises(ParameterError):
            iterated_bm_density(4, 1.0, 1.0)


class TestSymmetricStableLaw:
    def test_cauchy(self):
        assert alpha_stable_density_1d(1.0, 2.0, 1.0) == pytest.approx(2.0 / (math.pi * 5.0), rel=1e-15)
        assert alpha_stable_cdf_1d(1.0, 1.0, 1.0) == pytest.approx(0.75, rel=1e-15)
        assert alpha_stable_abs_median(1.0, 3.0) == 3.0

    def test_brownian_at_twice_speed(self):
        assert alpha_stable_density_1d(2.0, 1.0, 1.0) == pytest.approx(math.exp(-0.25) / math.sqrt(4.0 * math.pi))
        assert alpha_stable_abs_median(2.0, 1.0) == pytest.approx(HALF_NORMAL_MEDIAN, abs=1e-8)

    def test_cdf_integrates_density(self):
        alpha, s = 1.5, 1.0
        mass, _ = integrate.quad(lambda y: alpha_stable_density_1d(alpha, 1.0, y), 0.0, s, epsabs=1e-12)
        assert alpha_stable_cdf_1d(alpha, 1.0, s) - 0.5 == pytest.approx(mass, abs=1e-8)

    def test_density_at_origin(self):
        """p^α(t, 0) = Γ(1+1/α) / (π t^{1/α}); α = 3/2 gives Γ(5/3)/π at t = 1."""
        assert alpha_stable_density_1d(1.5, 1.0, 0.0) == pytest.approx(math.gamma(5.0 / 3.0) / math.pi, rel=1e-14)
        assert alpha_stable_density_1d(1.5, 8.0, 0.0) == pytest.approx(math.gamma(5.0 / 3.0) / (4.0 * math.pi),
                                                                       rel=1e-14)

    def test_symmetry(self):
        assert alpha_stable_cdf_1d(0.8, 1.0, -0.7) == pytest.approx(1.0 - alpha_stable_cdf_1d(0.8, 1.0, 0.7),
                                                                   abs=1e-12)
