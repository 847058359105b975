"""Summary statistics, a Kolmogorov-Smirnov normality check and rejection rates."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

__all__ = [
    "SampleSummary",
    "summarize",
    "normal_cdf",
    "ks_statistic",
    "kolmogorov_sf",
    "ks_normality_pvalue",
    "empirical_rate",
]


@dataclass(frozen=True)
class SampleSummary:
    count: int
    mean: float
    variance: float
    min: float
    max: float


def summarize(sample) -> SampleSummary:
    x = np.asarray(sample, dtype=float).ravel()
    if x.size == 0:
        raise ValidationError("cannot summarise an empty sample")
    var = float(x.var(ddof=1)) if x.size > 1 else 0.0
    return SampleSummary(int(x.size), float(x.mean()), var, float(x.min()), float(x.max()))


def normal_cdf(x) -> np.ndarray:
    # math.erfc is accurate to a few ulp; the erfc form avoids cancellation in the lower tail
    x = np.asarray(x, dtype=float)
    return np.vectorize(lambda v: 0.5 * math.erfc(-v / math.sqrt(2.0)), otypes=[float])(x)


def ks_statistic(sample) -> float:
    """Sup distance between the standardised empirical CDF and Phi."""
    x = np.sort(np.asarray(sample, dtype=float).ravel())
    m = x.size
    sd = x.std(ddof=1)
    if not sd > 0.0:
        raise ValidationError("degenerate sample: zero variance")
    cdf = normal_cdf((x - x.mean()) / sd)
    i = np.arange(1, m + 1)
    return float(max(np.max(i / m - cdf), np.max(cdf - (i - 1) / m)))


def kolmogorov_sf(y: float, tol: float = 1e-12) -> float:
    """Asymptotic ``P(sqrt(m) D > y) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 y^2)``."""
    if y <= 0.0:
        return 1.0
    total = 0.0
    k = 1
    while True:
        term = math.exp(-2.0 * k * k * y * y)
        total += term if k % 2 else -term
        if term < tol:
            break
        k += 1
        if k > 10_000:
            break
    return min(max(2.0 * total, 0.0), 1.0)


def ks_normality_pvalue(sample) -> float:
    """Asymptotic KS p-value against N(mean, sd) fitted to the sample itself.

    Plain Kolmogorov critical values are used, not Lilliefors ones, so the
    p-value is conservative when parameters are estimated.
    """
    x = np.asarray(sample, dtype=float).ravel()
    if x.size < 30:
        raise ValidationError(f"KS check needs at least 30 observations, got {x.size}")
    d = ks_statistic(x)
    return kolmogorov_sf(math.sqrt(x.size) * d)


def empirical_rate(decisions) -> float:
    flags = np.asarray(decisions, dtype=bool).ravel()
    if flags.size == 0:
        raise ValidationError("empirical rate of an empty sequence")
    return float(np.count_nonzero(flags)) / flags.size
