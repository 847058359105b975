"""Data-generating processes for random-walk and stationary AR panels.

Errors follow a diagonal AR(1) ``e[j, t] = P[j] * e[j, t-1] + eps[j, t]``,
started from zero and run through a burn-in before the first kept column.
Observations follow ``X_t = (I - Pi) phi + Pi X_{t-1} + e_t`` from ``X_0 = x0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._backend import first_order_recursion
from .errors import ValidationError
from .randomness import NoiseDistribution, RngStream, draw_mixture, draw_noise

__all__ = [
    "LagModel",
    "NoisePlan",
    "Panel",
    "UnitRootScenario",
    "ar1_filter",
    "sinusoidal_ar_profile",
    "generate_errors",
    "generate_panel",
    "spectral_density",
    "read_panel_csv",
    "write_panel_csv",
]

DEFAULT_BURN_IN = 1000


def sinusoidal_ar_profile(n: int) -> np.ndarray:
    """AR coefficients ``0.5 + 0.2 sin(2 pi j / n)`` for j = 1..n."""
    j = np.arange(1, n + 1)
    return 0.5 + 0.2 * np.sin(2.0 * np.pi * j / n)


@dataclass(frozen=True)
class LagModel:
    """Diagonal AR(1) error model with its lag-polynomial bounds.

    ``b`` is the smallest |sum_k P^k| and ``B`` the largest sum_k (1+k)|P|^k
    over the series; both are finite and positive whenever every |P_j| < 1.
    """

    ar_coeffs: np.ndarray
    burn_in: int = DEFAULT_BURN_IN
    b: float = field(init=False)
    B: float = field(init=False)

    def __post_init__(self) -> None:
        coeffs = np.array(self.ar_coeffs, dtype=float).ravel()
        coeffs.setflags(write=False)
        if coeffs.size < 1:
            raise ValidationError("LagModel needs at least one series")
        if not np.all(np.isfinite(coeffs)) or np.any(np.abs(coeffs) >= 1.0):
            raise ValidationError("AR coefficients must satisfy |P_j| < 1")
        if int(self.burn_in) < 0:
            raise ValidationError("burn_in must be non-negative")
        object.__setattr__(self, "ar_coeffs", coeffs)
        object.__setattr__(self, "burn_in", int(self.burn_in))
        object.__setattr__(self, "b", float(np.min(np.abs(1.0 / (1.0 - coeffs)))))
        object.__setattr__(self, "B", float(np.max(1.0 / (1.0 - np.abs(coeffs)) ** 2)))

    @property
    def n(self) -> int:
        return self.ar_coeffs.size

    @classmethod
    def sinusoidal(cls, n: int, burn_in: int = DEFAULT_BURN_IN) -> "LagModel":
        return cls(sinusoidal_ar_profile(n), burn_in)

    def long_run_gain(self) -> np.ndarray:
        """Per-series sum of lag coefficients, ``1 / (1 - P_j)``."""
        return 1.0 / (1.0 - self.ar_coeffs)


@dataclass(frozen=True)
class NoisePlan:
    """Rule assigning a noise law to each cell (j, t).

    With ``distribution=None`` (the default) cell (j, t) gets
    ``Mixture(0.5 + 0.2 sin(2 pi j / n) + 0.3 cos(2 pi t / T))`` with j = 1..n
    and t the time index, which is <= 0 during burn-in.
    """

    distribution: NoiseDistribution | None = None

    def probabilities(self, n: int, T: int, times: np.ndarray) -> np.ndarray:
        j = np.arange(1, n + 1)
        times = np.asarray(times, dtype=float)
        p = 0.5 + 0.2 * np.sin(2.0 * np.pi * j / n)[:, None] + 0.3 * np.cos(2.0 * np.pi * times / T)[None, :]
        return np.clip(p, 0.0, 1.0)

    def distribution_at(self, j: int, t: int, n: int, T: int) -> NoiseDistribution:
        if self.distribution is not None:
            return self.distribution
        return NoiseDistribution.mixture(float(self.probabilities(n, T, [t])[j - 1, 0]))

    def sample(self, n: int, T: int, times: np.ndarray, rng: RngStream) -> np.ndarray:
        times = np.asarray(times)
        if self.distribution is not None:
            return draw_noise(self.distribution, rng, size=(n, times.size))
        return draw_mixture(self.probabilities(n, T, times), rng)


@dataclass(frozen=True)
class Panel:
    """An n x T matrix of observations, rows are series."""

    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=float, order="C")
        if vals.ndim != 2:
            raise ValidationError(f"panel must be two-dimensional, got shape {vals.shape}")
        n, T = vals.shape
        if n < 2 or T < 2:
            raise ValidationError(f"panel needs n >= 2 and T >= 2, got {n} x {T}")
        if not np.all(np.isfinite(vals)):
            raise ValidationError("panel contains non-finite entries")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def T(self) -> int:
        return self.values.shape[1]

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


@dataclass(frozen=True)
class UnitRootScenario:
    """Diagonal autoregression ``X_t = (I - Pi) phi + Pi X_{t-1} + e_t``."""

    pi: np.ndarray
    phi: np.ndarray | None = None
    x0: np.ndarray | None = None

    def __post_init__(self) -> None:
        pi = np.array(self.pi, dtype=float).ravel()
        n = pi.size
        phi = np.zeros(n) if self.phi is None else np.array(self.phi, dtype=float).ravel()
        x0 = np.zeros(n) if self.x0 is None else np.array(self.x0, dtype=float).ravel()
        if phi.size != n or x0.size != n:
            raise ValidationError("pi, phi and x0 must all have length n")
        if not (np.all(np.isfinite(pi)) and np.all(np.isfinite(phi)) and np.all(np.isfinite(x0))):
            raise ValidationError("scenario parameters must be finite")
        object.__setattr__(self, "pi", pi)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "x0", x0)

    @property
    def n(self) -> int:
        return self.pi.size

    @property
    def rho0(self) -> float:
        return float(np.max(np.abs(self.pi)))

    @property
    def is_unit_root(self) -> bool:
        return bool(np.all(self.pi == 1.0))

    @classmethod
    def unit_root(cls, n: int) -> "UnitRootScenario":
        return cls(np.ones(n))

    @classmethod
    def stationary(cls, n: int, rho: float) -> "UnitRootScenario":
        if not -1.0 < rho < 1.0:
            raise ValidationError(f"stationary coefficient must lie in (-1, 1), got {rho}")
        return cls(np.full(n, float(rho)))


def ar1_filter(ar_coeffs, noise, burn_in: int = 0, initial=None) -> np.ndarray:
    """Run ``e_t = P e_{t-1} + eps_t`` over the columns of ``noise``.

    The first ``burn_in`` columns are simulated and dropped.
    """
    noise = np.ascontiguousarray(noise, dtype=float)
    coeffs = np.ascontiguousarray(ar_coeffs, dtype=float)
    n = noise.shape[0]
    start = np.zeros(n) if initial is None else np.ascontiguousarray(initial, dtype=float)
    out = first_order_recursion(coeffs, np.zeros(n), start, noise)
    return out[:, burn_in:]


def generate_errors(model: LagModel, plan: NoisePlan, T: int, rng: RngStream) -> Panel:
    if T < 2:
        raise ValidationError("T must be at least 2")
    times = np.arange(1 - model.burn_in, T + 1)
    eps = plan.sample(model.n, T, times, rng)
    return Panel(ar1_filter(model.ar_coeffs, eps, model.burn_in))


def generate_panel(scenario: UnitRootScenario, errors: Panel | np.ndarray) -> Panel:
    e = np.ascontiguousarray(errors, dtype=float)
    if e.ndim != 2 or e.shape[0] != scenario.n:
        raise ValidationError(f"errors have shape {e.shape}, scenario expects {scenario.n} rows")
    drift = (1.0 - scenario.pi) * scenario.phi
    return Panel(first_order_recursion(scenario.pi, drift, scenario.x0, e))


def spectral_density(model: LagModel, j: int, theta: float) -> float:
    """Spectral density of the AR(1) error of row ``j`` (0-based) at ``theta``."""
    p = float(model.ar_coeffs[j])
    return 1.0 / (2.0 * math.pi * (1.0 - 2.0 * p * math.cos(theta) + p * p))


def write_panel_csv(target, panel: Panel | np.ndarray) -> None:
    """Write ``n`` rows of ``T`` comma-separated values, no header."""
    if isinstance(target, (str, Path)):
        target = Path(target)
    np.savetxt(target, np.asarray(panel, dtype=float), delimiter=",", fmt="%.17g")


def read_panel_csv(path) -> Panel:
    try:
        values = np.loadtxt(Path(path), delimiter=",", ndmin=2, dtype=float)
    except (OSError, ValueError) as exc:
        raise ValidationError(f"cannot parse panel CSV {path}: {exc}") from exc
    return Panel(values)
