"""Centering and scaling for the log-determinant limit laws, plus
normal goodness-of-fit utilities.

Two standardizations are provided.  For the correlation matrix,

    (log det R - mu) / sigma,   mu = (p - n + 1/2) log(1 - p/n) - p + p/n,
                                sigma^2 = -2 log(1 - p/n) - 2 p/n,

with no dependence on the entry distribution's fourth moment.  For the
covariance matrix the centering and variance pick up fourth-moment
corrections.  ``stirling_gap`` evaluates the finite-n defect between the
correlation centering and the combinatorial constant of the sequential
decomposition; it vanishes as n grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy import special

from .errors import ParameterDomainError


def _check_shape(p: int, n: int) -> None:
    if not 0 < p < n:
        raise ParameterDomainError(f"need 0 < p < n, got p={p}, n={n}")


@dataclass(frozen=True)
class LawConstants:
    """All deterministic constants of the correlation log-det law at (p, n)."""

    p: int
    n: int
    gamma_hat: float
    mu_n: float
    sigma2_n: float
    c_n: float


def law_constants(p: int, n: int) -> LawConstants:
    _check_shape(p, n)
    ratio = p / n
    mu = (p - n + 0.5) * math.log1p(-ratio) - p + ratio
    sigma2 = -2.0 * math.log1p(-ratio) - 2.0 * ratio
    c_n = float(np.sum(np.log1p(-np.arange(p) / n)))
    return LawConstants(p=p, n=n, gamma_hat=ratio, mu_n=mu, sigma2_n=sigma2, c_n=c_n)


def standardize_corr(logdet_r: float, p: int, n: int) -> float:
    """Standardized correlation log-determinant (asymptotically N(0,1))."""
    constants = law_constants(p, n)
    return (logdet_r - constants.mu_n) / math.sqrt(constants.sigma2_n)


def standardize_cov(logdet_s: float, p: int, n: int, fourth_moment: float) -> float:
    """Standardized covariance log-determinant for variance-one entries.

    ``fourth_moment`` is E[X^4] of the (variance-one) entry; the variance
    expression can turn non-positive for fourth moments below 3 at extreme
    aspect ratios, which is surfaced as a domain error rather than a NaN.
    """
    _check_shape(p, n)
    if not fourth_moment >= 1.0:
        raise ParameterDomainError("fourth moment must be >= 1 for unit-variance entries")
    ratio = p / n
    excess = fourth_moment - 3.0
    centering = (p - n + 0.5) * math.log1p(-ratio) - p + 0.5 * excess * ratio
    variance = -2.0 * math.log1p(-ratio) + excess * ratio
    if not variance > 0.0:
        raise ParameterDomainError(
            f"non-positive limit variance {variance:.3e} at p/n={ratio:.3f}"
        )
    return (logdet_s - centering) / math.sqrt(variance)


def stirling_gap(p: int, n: int) -> float:
    """Finite-n defect ``(p-n-1/2) log(1-p/n) - p - sum_{i<p} log(1-i/n)``.

    Exactly the mismatch between the correlation-law centering, the
    combinatorial constant of the sequential decomposition, and the
    aggregated step variance; it is O(1/n) at a fixed aspect ratio.
    """
    _check_shape(p, n)
    ratio = p / n
    tail = float(np.sum(np.log1p(-np.arange(1, p) / n)))
    return (p - n - 0.5) * math.log1p(-ratio) - p - tail


def kolmogorov_sf(lam: float, rel_tol: float = 1e-10) -> float:
    """Survival function of the Kolmogorov distribution.

    Alternating series ``2 * sum_{j>=1} (-1)^(j-1) exp(-2 j^2 lam^2)``,
    truncated once the next term is below ``rel_tol`` relative to the sum.
    """
    if lam <= 0.0:
        return 1.0
    total = 0.0
    sign = 1.0
    for j in range(1, 1001):
        term = math.exp(-2.0 * j * j * lam * lam)
        total += sign * term
        if term <= rel_tol * max(total, 1e-300):
            break
        sign = -sign
    return min(1.0, max(0.0, 2.0 * total))


class KsResult(NamedTuple):
    statistic: float
    p_value: float


def ks_test(samples: Sequence[float]) -> KsResult:
    """Two-sided Kolmogorov-Smirnov test against the standard normal.

    Uses the asymptotic p-value (adequate at the replication counts this
    package runs); needs at least 8 samples.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    m = x.size
    if m < 8:
        raise ParameterDomainError("KS test needs at least 8 samples")
    cdf = special.ndtr(x)
    grid = np.arange(1, m + 1) / m
    d_plus = float(np.max(grid - cdf))
    d_minus = float(np.max(cdf - (grid - 1.0 / m)))
    stat = max(d_plus, d_minus)
    return KsResult(statistic=stat, p_value=kolmogorov_sf(math.sqrt(m) * stat))


class SummaryMoments(NamedTuple):
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float
    se_mean: float
    se_variance: float
    se_skewness: float
    se_kurtosis: float


def _moments_of(x: np.ndarray) -> tuple[float, float, float, float]:
    m = x.size
    mean = float(np.mean(x))
    d = x - mean
    m2 = float(np.mean(d**2))
    m3 = float(np.mean(d**3))
    m4 = float(np.mean(d**4))
    variance = m2 * m / (m - 1)
    if m2 > 0:
        g1 = m3 / m2**1.5
        skew = math.sqrt(m * (m - 1)) / (m - 2) * g1 if m > 2 else g1
        g2 = m4 / m2**2 - 3.0
        kurt = (
            (m - 1) / ((m - 2) * (m - 3)) * ((m + 1) * g2 + 6.0) if m > 3 else g2
        )
    else:
        skew = 0.0
        kurt = 0.0
    return mean, variance, skew, kurt


def summary_moments(samples: Sequence[float], batches: int = 16) -> SummaryMoments:
    """Unbiased-style mean/variance/skewness/excess-kurtosis estimates with
    batch-means standard errors."""
    x = np.asarray(samples, dtype=float)
    if x.size < 8:
        raise ParameterDomainError("summary moments need at least 8 samples")
    mean, variance, skew, kurt = _moments_of(x)
    b = max(2, min(batches, x.size // 4))
    splits = np.array_split(x, b)
    stats = np.array([_moments_of(chunk) for chunk in splits])
    se = np.std(stats, axis=0, ddof=1) / math.sqrt(b)
    return SummaryMoments(
        mean=mean,
        variance=variance,
        skewness=skew,
        excess_kurtosis=kurt,
        se_mean=float(se[0]),
        se_variance=float(se[1]),
        se_skewness=float(se[2]),
        se_kurtosis=float(se[3]),
    )
