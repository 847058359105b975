"""Unit-root test from the largest eigenvalue of the sample correlation matrix.

The statistic is ``sqrt(n) (lambda_1 / n - m1) / s11`` and H0 (every series has
a unit root) is rejected when its absolute value reaches ``log n``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ValidationError
from .limitlaw import LimitMoments
from .spectra import correlation_eigenvalues

__all__ = ["TestResult", "test_statistic", "decide", "run_test"]


@dataclass(frozen=True)
class TestResult:
    __test__ = False  # keep pytest from collecting this class

    statistic: float
    lambda1_over_n: float
    threshold: float
    reject: bool
    n: int
    T: int
    limit_ref: str

    def to_dict(self) -> dict:
        return asdict(self)


def test_statistic(lambda1: float, n: int, moments: LimitMoments) -> float:
    if n < 2:
        raise ValidationError(f"n must be at least 2, got {n}")
    if not moments.s11 > 0.0:
        raise ValidationError("invalid limit table: s11 must be positive")
    return math.sqrt(n) * (lambda1 / n - moments.m1) / moments.s11


test_statistic.__test__ = False


def decide(statistic: float, n: int) -> bool:
    """Reject H0 iff ``|statistic| >= log n``."""
    if n < 2:
        raise ValidationError(f"n must be at least 2, got {n}")
    return abs(statistic) >= math.log(n)


def run_test(X, moments: LimitMoments) -> TestResult:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValidationError(f"panel must be two-dimensional, got shape {X.shape}")
    n, T = X.shape
    lam1 = float(correlation_eigenvalues(X)[0])
    stat = test_statistic(lam1, n, moments)
    return TestResult(
        statistic=stat,
        lambda1_over_n=lam1 / n,
        threshold=math.log(n),
        reject=decide(stat, n),
        n=n,
        T=T,
        limit_ref=moments.source,
    )


run_test.__test__ = False
