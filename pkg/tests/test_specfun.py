import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate, stats

from replirate.core.exceptions import DomainError
from replirate.core.specfun import (
    BetaShape,
    beta_shape_from_mean_icc,
    binomial_head,
    binomial_tail,
    bivariate_normal_cdf,
    normal_cdf,
    normal_ppf,
)


def plackett_oracle(h: float, k: float, r: float) -> float:
    """Phi2(h, k; r) = Phi(h)Phi(k) + integral over t in [0, r] of the bivariate density."""

    def density(t):
        s = 1.0 - t * t
        return math.exp(-(h * h - 2.0 * t * h * k + k * k) / (2.0 * s)) / (2.0 * math.pi * math.sqrt(s))

    value, _ = integrate.quad(density, 0.0, r, epsabs=1e-14, epsrel=1e-12)
    return stats.norm.cdf(h) * stats.norm.cdf(k) + value


class TestBetaShape:
    def test_symmetric_shapes(self):
        shape = beta_shape_from_mean_icc(0.5, 0.5)
        assert shape.a == pytest.approx(0.5)
        assert shape.b == pytest.approx(0.5)

    def test_moments_match(self):
        shape = beta_shape_from_mean_icc(0.8, 0.1)
        assert shape.a == pytest.approx(7.2)
        assert shape.b == pytest.approx(1.8)
        assert shape.mean == pytest.approx(stats.beta(7.2, 1.8).mean())
        assert shape.variance == pytest.approx(0.8 * 0.2 * 0.1)

    def test_exact_replication_limit_grows_shapes(self):
        shape = beta_shape_from_mean_icc(0.5, 1e-9)
        assert shape.a == shape.b
        assert shape.a > 1e8

    @pytest.mark.parametrize("mu, rho", [(0.0, 0.2), (1.0, 0.2), (0.5, 0.0), (0.5, 1.0)])
    def test_closed_endpoints_rejected(self, mu, rho):
        with pytest.raises(DomainError):
            beta_shape_from_mean_icc(mu, rho)

    def test_shapes_positive(self):
        with pytest.raises(ValueError):
            BetaShape(a=0.0, b=1.0)


class TestNormal:
    def test_values(self):
        assert normal_cdf(0.0) == 0.5
        assert normal_cdf(1.0) == pytest.approx(0.8413447460685429, abs=1e-15)
        assert normal_cdf(0.8944) == pytest.approx(0.814, abs=1e-3)

    def test_quantile_inverts_cdf(self):
        z = np.linspace(-5.0, 5.0, 41)
        np.testing.assert_allclose(normal_ppf(normal_cdf(z)), z, atol=1e-10)

    def test_quantile_domain(self):
        with pytest.raises(DomainError):
            normal_ppf(1.5)


class TestBivariateNormal:
    def test_independence(self):
        assert bivariate_normal_cdf(0.0, 0.0, 0.0) == pytest.approx(0.25, abs=1e-15)

    def test_origin_identity(self):
        assert bivariate_normal_cdf(0.0, 0.0, 0.5) == pytest.approx(1.0 / 3.0, abs=1e-14)

    def test_perfect_correlation_collapses(self):
        h = 0.8944
        assert bivariate_normal_cdf(h, h, 1.0) == pytest.approx(normal_cdf(h), abs=1e-14)
        assert bivariate_normal_cdf(h, h, 1.0) == pytest.approx(0.814, abs=1e-3)

    def test_perfect_anticorrelation(self):
        # P(X <= h, -X <= k) = max(0, Phi(h) - Phi(-k))
        assert bivariate_normal_cdf(0.5, 0.3, -1.0) == pytest.approx(normal_cdf(0.5) - normal_cdf(-0.3), abs=1e-14)
        assert bivariate_normal_cdf(-0.5, -0.3, -1.0) == 0.0

    @pytest.mark.parametrize(
        "h, k, r",
        [
            (0.3, -0.4, 0.2),
            (1.2, 0.7, -0.6),
            (-1.5, -0.2, 0.8),
            (0.3, -0.4, 0.95),
            (-0.8, 1.1, -0.97),
            (2.0, 2.0, 0.93),
            (0.4472, 0.4472, 0.2),
        ],
    )
    def test_against_plackett_integral(self, h, k, r):
        assert bivariate_normal_cdf(h, k, r) == pytest.approx(plackett_oracle(h, k, r), abs=1e-10)

    def test_infinite_limits(self):
        assert bivariate_normal_cdf(np.inf, 0.3, 0.5) == pytest.approx(normal_cdf(0.3))
        assert bivariate_normal_cdf(0.3, np.inf, -0.5) == pytest.approx(normal_cdf(0.3))
        assert bivariate_normal_cdf(-np.inf, 0.3, 0.5) == 0.0
        assert bivariate_normal_cdf(np.inf, np.inf, 0.1) == 1.0

    def test_vectorised_shape(self):
        h = np.linspace(-2.0, 2.0, 6).reshape(2, 3)
        out = bivariate_normal_cdf(h, h, 0.95)
        assert out.shape == (2, 3)
        assert np.all(np.diff(out.ravel()) > 0.0)

    def test_symmetric_in_arguments(self):
        assert bivariate_normal_cdf(0.2, -1.1, 0.4) == pytest.approx(bivariate_normal_cdf(-1.1, 0.2, 0.4), abs=1e-15)

    @pytest.mark.parametrize("r", [1.5, -1.01, np.nan])
    def test_invalid_correlation(self, r):
        with pytest.raises(DomainError):
            bivariate_normal_cdf(0.0, 0.0, r)


class TestBinomialTail:
    def test_critical_value_size(self):
        assert binomial_tail(100, 59, 0.5) == pytest.approx(0.0443, abs=1e-4)

    def test_zero_critical_is_whole_support(self):
        assert binomial_tail(25, 0, 0.3) == 1.0
        assert binomial_head(25, 0, 0.3) == 0.0

    def test_exact_summation(self):
        p = Fraction(3, 10)
        exact = sum(math.comb(10, x) * p**x * (1 - p) ** (10 - x) for x in range(5, 11))
        assert binomial_tail(10, 5, 0.3) == pytest.approx(float(exact), rel=1e-13)

    def test_head_complements_tail(self):
        p = np.linspace(0.0, 1.0, 11)
        np.testing.assert_allclose(binomial_tail(40, 17, p) + binomial_head(40, 17, p), 1.0, atol=1e-14)

    def test_far_tail_stays_positive(self):
        assert 0.0 < binomial_tail(100, 59, 0.05) < 1e-30

    @pytest.mark.parametrize("n, c, p", [(10, 11, 0.5), (10, -1, 0.5), (10, 5, 1.2), (-1, 0, 0.5)])
    def test_domain(self, n, c, p):
        with pytest.raises(DomainError):
            binomial_tail(n, c, p)
