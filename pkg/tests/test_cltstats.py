import math

import numpy as np
import pytest
from scipy import special, stats

from corrlogdet import (
    ParameterDomainError,
    ks_test,
    law_constants,
    standardize_corr,
    standardize_cov,
    stirling_gap,
    summary_moments,
)
from corrlogdet.cltstats import kolmogorov_sf


def test_constants_at_half_ratio():
    c = law_constants(500, 1000)
    assert c.mu_n == pytest.approx(-499.5 * math.log(0.5) - 499.5, rel=1e-12)
    assert c.mu_n == pytest.approx(-153.273, abs=5e-4)
    assert c.sigma2_n == pytest.approx(2.0 * math.log(2.0) - 1.0, rel=1e-12)
    assert c.gamma_hat == 0.5
    assert c.c_n < 0.0


def test_standardize_corr_centering():
    c = law_constants(200, 500)
    assert standardize_corr(c.mu_n, 200, 500) == 0.0
    assert standardize_corr(c.mu_n + math.sqrt(c.sigma2_n), 200, 500) == pytest.approx(1.0)


def test_standardize_corr_domain():
    with pytest.raises(ParameterDomainError):
        standardize_corr(0.0, 500, 500)
    with pytest.raises(ParameterDomainError):
        standardize_corr(0.0, 0, 500)


def test_standardize_cov_gaussian_reduction():
    # with fourth moment 3 the covariance constants differ from the
    # correlation ones only by the p/n centering shift and the 2p/n variance
    p, n = 100, 400
    c = law_constants(p, n)
    ratio = p / n
    cov_center = c.mu_n - ratio  # (p-n+1/2)log(1-g) - p
    z = standardize_cov(cov_center, p, n, 3.0)
    assert z == pytest.approx(0.0, abs=1e-12)
    one_sigma = math.sqrt(-2.0 * math.log1p(-ratio))
    assert standardize_cov(cov_center + one_sigma, p, n, 3.0) == pytest.approx(1.0)
    assert -2.0 * math.log1p(-ratio) == pytest.approx(c.sigma2_n + 2.0 * ratio)


def test_standardize_cov_guards():
    with pytest.raises(ParameterDomainError):
        standardize_cov(0.0, 100, 400, 0.5)
    with pytest.raises(ParameterDomainError):
        standardize_cov(0.0, 400, 400, 3.0)


def test_stirling_gap_small_p():
    for n in range(2, 50):
        assert abs(stirling_gap(1, n)) < 0.51
    assert abs(stirling_gap(1, 10**6)) < 1e-5


def test_stirling_gap_half_ratio():
    assert abs(stirling_gap(500, 1000)) < 5e-3
    assert abs(stirling_gap(1000, 2000)) < abs(stirling_gap(500, 1000))


def test_stirling_gap_scaled_stays_bounded():
    values = [n * abs(stirling_gap(n // 2, n)) for n in (200, 400, 1000, 2000, 4000)]
    assert max(values) < 0.25


def test_ks_statistic_on_quantile_grid():
    m = 1000
    samples = special.ndtri((np.arange(1, m + 1) - 0.5) / m)
    result = ks_test(samples)
    assert result.statistic <= 1.0 / (2 * m) + 1e-6


def test_ks_matches_scipy():
    rng = np.random.default_rng(0)
    x = rng.normal(size=500)
    ours = ks_test(x)
    ref = stats.kstest(x, "norm", mode="asymp")
    assert ours.statistic == pytest.approx(ref.statistic, abs=1e-12)
    assert ours.p_value == pytest.approx(ref.pvalue, abs=1e-8)


def test_kolmogorov_sf_matches_scipy():
    for lam in (0.3, 0.5, 0.8, 1.0, 1.5, 2.0):
        assert kolmogorov_sf(lam) == pytest.approx(float(special.kolmogorov(lam)), abs=1e-10)
    assert kolmogorov_sf(0.0) == 1.0
    assert kolmogorov_sf(10.0) < 1e-80


def test_ks_calibration_under_null():
    rng = np.random.default_rng(1)
    rejected = 0
    seeds = 300
    for _ in range(seeds):
        x = rng.normal(size=2000)
        if ks_test(x).p_value <= 0.001:
            rejected += 1
    assert rejected <= 3


def test_ks_power_against_inflated_scale():
    rng = np.random.default_rng(2)
    x = 1.5 * rng.normal(size=2000)
    assert ks_test(x).p_value < 0.001


def test_ks_needs_samples():
    with pytest.raises(ParameterDomainError):
        ks_test([0.0] * 7)


def test_summary_moments_constant():
    s = summary_moments([2.5] * 64)
    assert s.variance == 0.0
    assert s.mean == 2.5


def test_summary_moments_gaussian_calibration():
    rng = np.random.default_rng(3)
    x = rng.normal(size=10**5)
    s = summary_moments(x)
    assert abs(s.variance - 1.0) <= 5.0 * s.se_variance
    assert abs(s.mean) <= 5.0 * s.se_mean
    assert abs(s.skewness) <= 5.0 * s.se_skewness
    assert abs(s.excess_kurtosis) <= 5.0 * s.se_kurtosis


def test_summary_moments_skewed_law():
    rng = np.random.default_rng(4)
    x = rng.exponential(size=10**5)
    s = summary_moments(x)
    assert s.skewness == pytest.approx(2.0, abs=0.15)
    assert s.excess_kurtosis == pytest.approx(6.0, abs=1.0)


def test_summary_moments_needs_samples():
    with pytest.raises(ParameterDomainError):
        summary_moments([1.0, 2.0])
