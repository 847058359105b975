"""Seedable, splittable random streams and the noise laws used by the simulations.

Every stream is a Philox counter-based generator keyed by ``(seed, stream_id)``
through :class:`numpy.random.SeedSequence`, so replication ``r`` can be drawn
on any worker without touching the streams of other replications.

Normal variates come from numpy's ziggurat sampler, which is exact to double
precision (rejection-corrected, no table truncation).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

__all__ = [
    "RngStream",
    "NoiseKind",
    "NoiseDistribution",
    "draw_standard_normal",
    "draw_noise",
    "SQRT3",
]

SQRT3 = math.sqrt(3.0)
_U64 = 1 << 64


@dataclass(frozen=True)
class RngStream:
    """Independent random stream identified by ``(seed, stream_id)``.

    Two streams with equal identifiers produce identical sequences. The
    generator itself is created lazily and is private to the instance; do not
    share one instance between workers, construct a fresh one instead.
    """

    seed: int = 0
    stream_id: int = 0
    _gen: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        for name in ("seed", "stream_id"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or not 0 <= value < _U64:
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {value!r}")
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream_id),))
        object.__setattr__(self, "_gen", np.random.Generator(np.random.Philox(ss)))

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def fresh(self) -> "RngStream":
        """Return a new stream positioned at the start of the same sequence."""
        return RngStream(self.seed, self.stream_id)

    def substream(self, stream_id: int) -> "RngStream":
        return RngStream(self.seed, stream_id)

    def standard_normal(self, size=None):
        return self._gen.standard_normal(size)

    def uniform(self, low: float = 0.0, high: float = 1.0, size=None):
        return self._gen.uniform(low, high, size)

    def exponential(self, size=None):
        return self._gen.standard_exponential(size)


class NoiseKind(str, Enum):
    STANDARD_NORMAL = "standard_normal"
    CENTERED_EXPONENTIAL = "centered_exponential"
    UNIFORM_SQRT3 = "uniform_sqrt3"
    MIXTURE = "mixture"


@dataclass(frozen=True)
class NoiseDistribution:
    """Zero-mean, unit-variance noise law.

    ``MIXTURE`` draws a centered Exp(1) variate with probability ``p`` and a
    Uniform(-sqrt(3), sqrt(3)) variate otherwise.
    """

    kind: NoiseKind = NoiseKind.STANDARD_NORMAL
    p: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        if self.kind is NoiseKind.MIXTURE:
            if self.p is None or not 0.0 <= float(self.p) <= 1.0:
                raise ValueError(f"mixture probability must lie in [0, 1], got {self.p!r}")
        elif self.p is not None:
            raise ValueError(f"{self.kind.value} takes no mixture probability")

    @classmethod
    def standard_normal(cls) -> "NoiseDistribution":
        return cls(NoiseKind.STANDARD_NORMAL)

    @classmethod
    def centered_exponential(cls) -> "NoiseDistribution":
        return cls(NoiseKind.CENTERED_EXPONENTIAL)

    @classmethod
    def uniform_sqrt3(cls) -> "NoiseDistribution":
        return cls(NoiseKind.UNIFORM_SQRT3)

    @classmethod
    def mixture(cls, p: float) -> "NoiseDistribution":
        return cls(NoiseKind.MIXTURE, float(p))


def draw_standard_normal(rng: RngStream, size=None):
    """Draw N(0, 1) variates (a float when ``size`` is None)."""
    out = rng.standard_normal(size)
    return float(out) if size is None else out


def draw_mixture(p, rng: RngStream):
    """Vectorised mixture draw with an elementwise probability array ``p``.

    Draw order is fixed (selector, exponential, uniform) so that results depend
    only on the stream and the shape of ``p``.
    """
    p = np.asarray(p, dtype=float)
    if np.any((p < 0.0) | (p > 1.0)) or np.any(np.isnan(p)):
        raise ValueError("mixture probabilities must lie in [0, 1]")
    pick_exp = rng.uniform(size=p.shape) < p
    expo = rng.exponential(size=p.shape) - 1.0
    unif = rng.uniform(-SQRT3, SQRT3, size=p.shape)
    return np.where(pick_exp, expo, unif)


def draw_noise(dist: NoiseDistribution, rng: RngStream, size=None):
    """Draw from ``dist``; returns a float when ``size`` is None."""
    kind = dist.kind
    if kind is NoiseKind.STANDARD_NORMAL:
        out = rng.standard_normal(size)
    elif kind is NoiseKind.CENTERED_EXPONENTIAL:
        out = rng.exponential(size) - 1.0
    elif kind is NoiseKind.UNIFORM_SQRT3:
        out = rng.uniform(-SQRT3, SQRT3, size)
    else:
        shape = () if size is None else size
        out = draw_mixture(np.full(shape, dist.p), rng)
    return float(out) if size is None else out
