"""Monte Carlo for the limit variables of the leading correlation eigenvalues.

For i.i.d. standard normals Z_1, Z_2, ... the limit variables are

    calM[k, l] = (k l)^{-1} Z_k Z_l / sum_t t^{-2} Z_t^2,

with the denominator truncated at t = N. Moments of the diagonal entries
(means, the standard deviation of calM[1, 1] and the K x K covariance) drive
the centring and scaling of the test statistic.

Sampling is split into fixed-size chunks; chunk ``c`` always draws from
``RngStream(seed, LIMIT_STREAM_BASE + c)`` and chunk sums are reduced in chunk
order, so results do not depend on how chunks are spread over workers.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .randomness import RngStream

__all__ = [
    "LimitSample",
    "LimitMoments",
    "sample_limit",
    "estimate_moments",
    "truncation_bias_bound",
    "load_moments",
    "default_moments",
    "DEFAULT_N",
    "DEFAULT_SAMPLES",
]

DEFAULT_N = 10_000
DEFAULT_SAMPLES = 1_000_000
MIN_SAMPLES = 10_000
CHUNK = 5_000
BLOCK = 250
LIMIT_STREAM_BASE = 1 << 48
_TINY = 1e-300


def _weights(N: int) -> np.ndarray:
    t = np.arange(1, N + 1, dtype=float)
    return 1.0 / (t * t)


@dataclass(frozen=True)
class LimitSample:
    """One realisation of the K x K block of the limit variables."""

    K: int
    N: int
    values: np.ndarray  # K x K
    z: np.ndarray = field(repr=False)  # the N normals
    denominator: float = 0.0

    def diagonal_full(self) -> np.ndarray:
        """All N diagonal terms ``t^{-2} Z_t^2 / denominator``; they sum to one."""
        return _weights(self.N) * self.z * self.z / self.denominator


def sample_limit(K: int, N: int, rng: RngStream) -> LimitSample:
    K, N = int(K), int(N)
    if not 1 <= K <= N:
        raise ValidationError(f"need 1 <= K <= N, got K={K}, N={N}")
    w = _weights(N)
    while True:
        z = rng.standard_normal(N)
        den = float(np.dot(w, z * z))
        if den >= _TINY:
            break
    a = z[:K] / np.arange(1, K + 1)
    return LimitSample(K=K, N=N, values=np.outer(a, a) / den, z=z, denominator=den)


@dataclass
class _Sums:
    """Raw power sums of the K diagonal limit variables."""

    count: int
    s1: np.ndarray  # sum x_k
    s11: np.ndarray  # sum x_k x_l
    s21: np.ndarray  # sum x_k^2 x_l
    s22: np.ndarray  # sum x_k^2 x_l^2

    @classmethod
    def zero(cls, K: int) -> "_Sums":
        return cls(0, np.zeros(K), np.zeros((K, K)), np.zeros((K, K)), np.zeros((K, K)))

    def add(self, other: "_Sums") -> None:
        self.count += other.count
        self.s1 += other.s1
        self.s11 += other.s11
        self.s21 += other.s21
        self.s22 += other.s22


def _chunk_sums(args) -> _Sums:
    K, N, size, seed, chunk = args
    rng = RngStream(seed, LIMIT_STREAM_BASE + chunk)
    w = _weights(N)
    kk = np.arange(1, K + 1, dtype=float) ** 2
    acc = _Sums.zero(K)
    left = size
    while left > 0:
        b = min(BLOCK, left)
        z = rng.standard_normal((b, N))
        den = (z * z) @ w
        # redraw the (probability-zero) underflowing rows in place, in row order
        for i in np.flatnonzero(den < _TINY):
            while den[i] < _TINY:
                z[i] = rng.standard_normal(N)
                den[i] = float(np.dot(w, z[i] * z[i]))
        x = (z[:, :K] ** 2 / kk) / den[:, None]
        x2 = x * x
        acc.add(_Sums(b, x.sum(axis=0), x.T @ x, x2.T @ x, x2.T @ x2))
        left -= b
    return acc


@dataclass(frozen=True)
class LimitMoments:
    """Moment table for the diagonal limit variables.

    ``stderr`` carries plug-in standard errors (sample sd / sqrt(samples)) for
    ``m``, ``s11`` and ``cov``.
    """

    K: int
    N: int
    samples: int
    seed: int
    m: np.ndarray
    s11: float
    cov: np.ndarray
    stderr: dict
    source: str = "computed"

    def __post_init__(self) -> None:
        if not self.s11 > 0.0 or not math.isfinite(self.s11):
            raise ValidationError(f"invalid limit table: s11 must be positive, got {self.s11}")

    @property
    def m1(self) -> float:
        return float(self.m[0])

    def to_json(self) -> dict:
        return {
            "K": self.K,
            "N": self.N,
            "samples": self.samples,
            "seed": self.seed,
            "m": [float(x) for x in self.m],
            "s11": float(self.s11),
            "cov": [[float(x) for x in row] for row in self.cov],
            "stderr": {
                "m": [float(x) for x in self.stderr["m"]],
                "s11": float(self.stderr["s11"]),
                "cov": [[float(x) for x in row] for row in self.stderr["cov"]],
            },
        }

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n")

    @classmethod
    def from_json(cls, payload: dict, source: str = "json") -> "LimitMoments":
        try:
            K = int(payload["K"])
            m = np.asarray(payload["m"], dtype=float)
            cov = np.asarray(payload["cov"], dtype=float)
            se = payload["stderr"]
            stderr = {
                "m": np.asarray(se["m"], dtype=float),
                "s11": float(se["s11"]),
                "cov": np.asarray(se["cov"], dtype=float),
            }
            table = cls(
                K=K,
                N=int(payload["N"]),
                samples=int(payload["samples"]),
                seed=int(payload["seed"]),
                m=m,
                s11=float(payload["s11"]),
                cov=cov,
                stderr=stderr,
                source=source,
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"malformed limit table: {exc}") from exc
        if m.shape != (K,) or cov.shape != (K, K):
            raise ValidationError("limit table arrays do not match K")
        return table


def _finalize(sums: _Sums, K: int, N: int, seed: int) -> LimitMoments:
    n = sums.count
    mean = sums.s1 / n
    e11 = sums.s11 / n
    cov = (e11 - np.outer(mean, mean)) * (n / (n - 1))
    cov = 0.5 * (cov + cov.T)

    # fourth-order pieces for the influence-function variances
    e21 = sums.s21 / n  # E[x_k^2 x_l]
    e22 = sums.s22 / n  # E[x_k^2 x_l^2]
    mk, ml = mean[:, None], mean[None, :]
    ek2 = np.diag(e11)[:, None]
    el2 = np.diag(e11)[None, :]
    # E[(x_k - m_k)^2 (x_l - m_l)^2]
    c22 = (
        e22
        - 2 * ml * e21
        - 2 * mk * e21.T
        + ml**2 * ek2
        + mk**2 * el2
        + 4 * mk * ml * e11
        - 3 * mk**2 * ml**2
    )
    cov_pop = e11 - np.outer(mean, mean)
    se_cov = np.sqrt(np.maximum(c22 - cov_pop**2, 0.0) / n)
    var = np.diag(cov)
    se_m = np.sqrt(var / n)
    s11 = math.sqrt(var[0])
    mu4 = c22[0, 0]
    se_var = math.sqrt(max(mu4 - cov_pop[0, 0] ** 2, 0.0) / n)
    se_s11 = se_var / (2.0 * s11)
    return LimitMoments(
        K=K,
        N=N,
        samples=n,
        seed=seed,
        m=mean,
        s11=s11,
        cov=cov,
        stderr={"m": se_m, "s11": se_s11, "cov": se_cov},
    )


def _plan(samples: int) -> list[int]:
    full, rest = divmod(samples, CHUNK)
    return [CHUNK] * full + ([rest] if rest else [])


def estimate_moments(
    K: int,
    N: int = DEFAULT_N,
    samples: int = DEFAULT_SAMPLES,
    rng: RngStream | int | None = None,
    workers: int = 1,
    progress=None,
) -> LimitMoments:
    """Plug-in Monte Carlo estimates of the limit-variable moments.

    Only ``rng.seed`` is used: chunk streams are derived from it so that the
    estimate is the same for any number of ``workers``.
    """
    K, N, samples = int(K), int(N), int(samples)
    if not 1 <= K <= N:
        raise ValidationError(f"need 1 <= K <= N, got K={K}, N={N}")
    if samples < MIN_SAMPLES:
        raise ValidationError(f"need at least {MIN_SAMPLES} samples, got {samples}")
    seed = rng.seed if isinstance(rng, RngStream) else int(rng or 0)
    tasks = [(K, N, size, seed, c) for c, size in enumerate(_plan(samples))]
    total = _Sums.zero(K)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = pool.map(_chunk_sums, tasks)
            for i, part in enumerate(results):
                total.add(part)
                if progress:
                    progress(i + 1, len(tasks))
    else:
        for i, task in enumerate(tasks):
            total.add(_chunk_sums(task))
            if progress:
                progress(i + 1, len(tasks))
    return _finalize(total, K, N, seed)


def truncation_bias_bound(N: int) -> float:
    """Upper bound 1/N on the neglected tail mass ``sum_{t>N} t^{-2}``."""
    N = int(N)
    if N < 1:
        raise ValidationError("N must be at least 1")
    return 1.0 / N


def load_moments(path) -> LimitMoments:
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read limit table {path}: {exc}") from exc
    return LimitMoments.from_json(payload, source=str(path))


def default_moments() -> LimitMoments:
    """The committed reference table shipped with the package."""
    ref = resources.files("panelroot") / "data" / "limits_default.json"
    return LimitMoments.from_json(json.loads(ref.read_text()), source="panelroot:data/limits_default.json")
