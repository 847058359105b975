import math

import numpy as np
import pytest

from conftest import random_walk_panel
from panelroot import urtest
from panelroot.harness import H1_STREAM_OFFSET, simulate_panel
from panelroot.randomness import RngStream
from panelroot.errors import DegenerateRowError, ValidationError


def test_statistic_is_zero_at_the_centre(moments):
    assert urtest.test_statistic(100 * moments.m1, 100, moments) == pytest.approx(0.0, abs=1e-12)


def test_statistic_scaling(moments):
    n = 400
    lam = n * (moments.m1 + 2.0 * moments.s11 / math.sqrt(n))
    assert urtest.test_statistic(lam, n, moments) == pytest.approx(2.0, rel=1e-12)


@pytest.mark.parametrize(
    "n,stat,expected",
    [
        (100, math.log(100), True),
        (100, -math.log(100), True),
        (100, math.nextafter(math.log(100), 0), False),
        (100, 4.6052, True),
        (100, 10.5501, True),
        (2, 0.0, False),
        (1000, 0.0, False),
    ],
)
def test_decision_boundary(n, stat, expected):
    assert urtest.decide(stat, n) is expected


def test_invalid_n(moments):
    with pytest.raises(ValidationError):
        urtest.decide(0.0, 1)
    with pytest.raises(ValidationError):
        urtest.test_statistic(1.0, 1, moments)


def test_identical_rows(moments):
    row = np.cumsum(np.random.default_rng(0).standard_normal(50))
    X = np.tile(row, (20, 1))
    res = urtest.run_test(X, moments)
    assert res.lambda1_over_n == pytest.approx(1.0, rel=1e-12)
    assert res.statistic == pytest.approx(math.sqrt(20) * (1 - moments.m1) / moments.s11, rel=1e-12)
    assert res.reject


def test_affine_invariance(moments, np_rng):
    X = random_walk_panel(np_rng, 30, 40)
    Y = X * np_rng.uniform(0.5, 20, size=(30, 1)) - np_rng.uniform(-5, 5, size=(30, 1))
    a, b = urtest.run_test(X, moments), urtest.run_test(Y, moments)
    assert abs(a.statistic - b.statistic) < 1e-12 * max(1.0, abs(a.statistic))


def test_result_fields(moments, np_rng):
    res = urtest.run_test(random_walk_panel(np_rng, 10, 25), moments)
    d = res.to_dict()
    assert set(d) == {"statistic", "lambda1_over_n", "threshold", "reject", "n", "T", "limit_ref"}
    assert d["threshold"] == math.log(10)
    assert (d["n"], d["T"]) == (10, 25)
    assert d["reject"] == (abs(d["statistic"]) >= d["threshold"])


def test_rejects_bad_input(moments):
    with pytest.raises(ValidationError):
        urtest.run_test(np.ones(5), moments)
    with pytest.raises(DegenerateRowError):
        urtest.run_test(np.vstack([np.arange(5.0), np.ones(5)]), moments)


@pytest.mark.slow
def test_h0_replications(moments):
    results = [urtest.run_test(simulate_panel(100, 100, RngStream(1, rep)), moments) for rep in range(1000)]
    stats = np.array([r.statistic for r in results])
    assert abs(stats.mean() - 0.9129) <= 0.15
    assert np.mean([r.reject for r in results]) <= 0.01


@pytest.mark.slow
def test_h1_replications(moments):
    for rep in range(200):
        X = simulate_panel(100, 100, RngStream(1, rep + H1_STREAM_OFFSET), rho=0.6)
        assert urtest.run_test(X, moments).reject
