import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from panelroot.errors import ValidationError
from panelroot.limitlaw import (
    MIN_SAMPLES,
    LimitMoments,
    estimate_moments,
    load_moments,
    sample_limit,
    truncation_bias_bound,
)
from panelroot.randomness import RngStream


@pytest.fixture(scope="module")
def exact():
    return oracles.limit_moments(5)


def test_quadrature_oracle_self_consistency(exact):
    m, cov = exact
    # sum over all k of E[calM_kk] is one; the first five carry most of it
    assert 0.8 < m.sum() < 1.0
    assert np.all(np.diff(m) < 0)
    assert np.all(np.linalg.eigvalsh(cov) > 0)


class TestSample:
    @given(st.integers(0, 2**32), st.integers(1, 6), st.integers(6, 300))
    @settings(max_examples=40, deadline=None)
    def test_identities(self, seed, K, N):
        s = sample_limit(K, N, RngStream(seed))
        assert abs(s.diagonal_full().sum() - 1.0) < 1e-12
        diag = np.diag(s.values)
        assert np.all(diag >= 0) and np.all(diag <= 1)
        off = s.values[~np.eye(K, dtype=bool)]
        assert np.all(np.abs(off) <= 0.5)
        assert np.allclose(s.values, s.values.T)
        assert np.allclose(s.values[0, 1:] ** 2, diag[0] * diag[1:])

    def test_matches_definition(self):
        s = sample_limit(3, 50, RngStream(4, 9))
        z = s.z
        t = np.arange(1, 51)
        den = np.sum(z**2 / t**2)
        assert s.values[1, 2] == pytest.approx(z[1] * z[2] / (2 * 3) / den, rel=1e-13)
        assert s.values[0, 0] == pytest.approx(z[0] ** 2 / den, rel=1e-13)

    def test_same_stream_same_sample(self):
        a = sample_limit(2, 100, RngStream(1, 2))
        b = sample_limit(2, 100, RngStream(1, 2))
        assert np.array_equal(a.values, b.values)

    @pytest.mark.parametrize("K,N", [(0, 10), (11, 10)])
    def test_invalid(self, K, N):
        with pytest.raises(ValidationError):
            sample_limit(K, N, RngStream())


class TestEstimate:
    def test_worker_invariance(self):
        a = estimate_moments(2, 100, 12_000, 7, workers=1)
        b = estimate_moments(2, 100, 12_000, 7, workers=3)
        assert a.to_json() == b.to_json()

    def test_seed_changes_estimate(self):
        a = estimate_moments(1, 50, MIN_SAMPLES, 1)
        b = estimate_moments(1, 50, MIN_SAMPLES, 2)
        assert a.m1 != b.m1

    def test_rng_argument_uses_seed_only(self):
        a = estimate_moments(1, 50, MIN_SAMPLES, RngStream(5, 123))
        b = estimate_moments(1, 50, MIN_SAMPLES, 5)
        assert a.m1 == b.m1

    def test_stderr_formulas(self):
        t = estimate_moments(3, 100, 20_000, 3)
        assert np.allclose(t.stderr["m"], np.sqrt(np.diag(t.cov) / t.samples))
        assert t.s11 == pytest.approx(math.sqrt(t.cov[0, 0]))
        assert t.stderr["s11"] > 0
        assert np.all(t.stderr["cov"] > 0)

    def test_against_quadrature(self, exact):
        N = 1000
        t = estimate_moments(3, N, 40_000, 11)
        m, cov = exact
        bias = truncation_bias_bound(N)
        assert np.all(np.abs(t.m - m[:3]) <= 4 * t.stderr["m"] + bias)
        assert abs(t.s11 - math.sqrt(cov[0, 0])) <= 4 * t.stderr["s11"] + bias
        assert np.all(np.abs(t.cov - cov[:3, :3]) <= 4 * t.stderr["cov"] + bias)

    def test_stderr_is_calibrated(self):
        runs = [estimate_moments(1, 100, MIN_SAMPLES, seed) for seed in range(30)]
        m1 = np.array([r.m1 for r in runs])
        s11 = np.array([r.s11 for r in runs])
        ratio_m = m1.std(ddof=1) / np.mean([r.stderr["m"][0] for r in runs])
        ratio_s = s11.std(ddof=1) / np.mean([r.stderr["s11"] for r in runs])
        # 30 replicates: the sd ratio has relative spread about 0.13
        assert 0.6 < ratio_m < 1.5
        assert 0.6 < ratio_s < 1.5

    def test_doubling_N(self):
        a = estimate_moments(2, 500, 20_000, 21)
        b = estimate_moments(2, 1000, 20_000, 22)
        tol = 3 * np.hypot(a.stderr["m"], b.stderr["m"]) + truncation_bias_bound(500)
        assert np.all(np.abs(a.m - b.m) <= tol)

    @pytest.mark.parametrize("samples", [0, MIN_SAMPLES - 1])
    def test_too_few_samples(self, samples):
        with pytest.raises(ValidationError):
            estimate_moments(1, 100, samples, 0)

    def test_progress_callback(self):
        seen = []
        estimate_moments(1, 20, 12_000, 0, progress=lambda i, n: seen.append((i, n)))
        assert seen == [(1, 3), (2, 3), (3, 3)]


@pytest.mark.parametrize("N,bound", [(1, 1.0), (10, 0.1), (100, 1e-2), (10_000, 1e-4)])
def test_truncation_bias_bound(N, bound):
    assert truncation_bias_bound(N) == bound
    tail = 1.0 / N - sum(1.0 / t**2 for t in range(N + 1, N + 200_001)) - 1.0 / (N + 200_000)
    assert tail >= -1e-12


def test_truncation_bias_bound_vs_exact_tail():
    assert math.pi**2 / 6 - 1 == pytest.approx(0.6449, abs=1e-4)
    assert math.pi**2 / 6 - 1 <= truncation_bias_bound(1)


def test_truncation_bias_bound_invalid():
    with pytest.raises(ValidationError):
        truncation_bias_bound(0)


class TestSerialization:
    def test_round_trip(self, tmp_path):
        t = estimate_moments(2, 30, MIN_SAMPLES, 4)
        path = tmp_path / "limits.json"
        t.save(path)
        back = load_moments(path)
        assert back.to_json() == t.to_json()
        assert back.source == str(path)

    def test_missing_key(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"K": 1, "m": [0.4]}))
        with pytest.raises(ValidationError):
            load_moments(path)

    def test_nonpositive_s11(self):
        payload = {
            "K": 1, "N": 10, "samples": 10, "seed": 0, "m": [0.4], "s11": 0.0, "cov": [[0.0]],
            "stderr": {"m": [0.0], "s11": 0.0, "cov": [[0.0]]},
        }
        with pytest.raises(ValidationError):
            LimitMoments.from_json(payload)

    def test_shape_mismatch(self):
        payload = {
            "K": 2, "N": 10, "samples": 10, "seed": 0, "m": [0.4], "s11": 0.3, "cov": [[0.1]],
            "stderr": {"m": [0.0], "s11": 0.0, "cov": [[0.0]]},
        }
        with pytest.raises(ValidationError):
            LimitMoments.from_json(payload)

    def test_unreadable(self, tmp_path):
        with pytest.raises(ValidationError):
            load_moments(tmp_path / "absent.json")


class TestDefaultTable:
    def test_ordering(self, moments):
        assert moments.K >= 5
        assert np.all(np.diff(moments.m) < 0)
        assert np.all(moments.m > 0)

    def test_against_quadrature(self, moments, exact):
        m, cov = exact
        bias = truncation_bias_bound(moments.N)
        assert np.all(np.abs(moments.m[:5] - m) <= 3 * moments.stderr["m"][:5] + bias)
        assert abs(moments.s11 - math.sqrt(cov[0, 0])) <= 3 * moments.stderr["s11"] + bias
        d = np.abs(moments.cov[:5, :5] - cov)
        assert np.all(d <= 3 * moments.stderr["cov"][:5, :5] + bias)
