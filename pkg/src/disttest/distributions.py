"""Discrete distributions over [n], histograms, and samplers.

Symbols are indexed ``0 .. n-1``. Every random draw goes through a
:class:`numpy.random.Generator` backed by the counter-based Philox bit
generator; :func:`make_rng` derives independent streams from an integer
seed plus an optional key (e.g. a trial index).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Protocol, Union

import numpy as np

NORMALIZATION_TOL = 1e-9

#: Poissonized draws are truncated at ``POISSON_CAP * m`` samples.
POISSON_CAP = 4

SeedLike = Union[int, np.random.Generator]


def make_rng(seed: SeedLike, *key: int) -> np.random.Generator:
    """Return a Philox generator for ``seed`` and an optional spawn key.

    Passing an existing generator with no key returns it unchanged, so
    callers can thread one generator through several draws.
    """
    if isinstance(seed, np.random.Generator):
        if key:
            return np.random.Generator(
                np.random.Philox(np.random.SeedSequence(seed.integers(2**63), spawn_key=key))
            )
        return seed
    seed = int(seed)
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    """Probability vector over ``n`` symbols.

    Inputs whose total is within ``1e-9`` of one are renormalized; anything
    further off is rejected rather than silently fixed.
    """

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("probs must be a non-empty 1-d vector")
        if not np.all(np.isfinite(p)) or np.any(p < 0):
            raise ValueError("probabilities must be finite and non-negative")
        total = math.fsum(p)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1 (tol {NORMALIZATION_TOL})")
        object.__setattr__(self, "probs", _frozen(p / total))

    @property
    def n(self) -> int:
        return self.probs.size

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other):
        if not isinstance(other, DiscreteDistribution):
            return NotImplemented
        return np.array_equal(self.probs, other.probs)

    def __repr__(self):
        return f"DiscreteDistribution(n={self.n}, probs={np.array2string(self.probs, threshold=8)})"

    def mass(self, indices) -> float:
        """Total probability of ``indices`` (index array or boolean mask)."""
        return math.fsum(self.probs[indices])


def uniform(n: int) -> DiscreteDistribution:
    if n < 1:
        raise ValueError("support size must be positive")
    return DiscreteDistribution(np.full(n, 1.0 / n))


def point_mass(n: int, i: int = 0) -> DiscreteDistribution:
    p = np.zeros(n)
    p[i] = 1.0
    return DiscreteDistribution(p)


@dataclass(frozen=True, eq=False)
class Histogram:
    """Per-symbol sample counts.

    ``nominal_m`` is the budget the histogram was drawn with; under
    Poissonization the realized ``total`` differs from it. ``capped`` marks
    a Poisson draw that was truncated at ``POISSON_CAP * nominal_m``.
    """

    counts: np.ndarray
    nominal_m: int
    capped: bool = False

    def __post_init__(self):
        c = np.asarray(self.counts)
        if c.ndim != 1:
            raise ValueError("counts must be 1-d")
        if c.size and (not np.issubdtype(c.dtype, np.integer) and not np.all(c == np.floor(c))):
            raise ValueError("counts must be integers")
        c = c.astype(np.int64)
        if np.any(c < 0):
            raise ValueError("counts must be non-negative")
        object.__setattr__(self, "counts", _frozen(c))

    @property
    def n(self) -> int:
        return self.counts.size

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __eq__(self, other):
        if not isinstance(other, Histogram):
            return NotImplemented
        return (
            np.array_equal(self.counts, other.counts)
            and self.nominal_m == other.nominal_m
            and self.capped == other.capped
        )


@dataclass(frozen=True)
class MixWeight:
    """Weight ``delta`` in [0, 1] given to the uniform distribution by :func:`mix_uniform`."""

    delta: float

    def __post_init__(self):
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError(f"mixing weight must lie in [0, 1], got {self.delta}")


def mix_uniform(dist: DiscreteDistribution, w: MixWeight | float) -> DiscreteDistribution:
    """Return ``(1 - delta) * dist + delta * uniform``; every entry is at least ``delta / n``."""
    delta = w.delta if isinstance(w, MixWeight) else MixWeight(float(w)).delta
    return DiscreteDistribution((1.0 - delta) * dist.probs + delta / dist.n)


def empirical(hist: Histogram) -> DiscreteDistribution:
    total = hist.total
    if total == 0:
        raise ValueError("empirical distribution of an empty histogram is undefined")
    return DiscreteDistribution(hist.counts / total)


# -- samplers ---------------------------------------------------------------


class SamplerExhausted(RuntimeError):
    """A finite sample stream ran out before the requested draw completed."""


class Sampler(Protocol):
    """Sample access to an unknown distribution over ``n`` symbols."""

    n: int

    def draw(self, m: int, rng: np.random.Generator) -> np.ndarray:
        """Return the count vector of ``m`` fresh samples."""
        ...


@dataclass(frozen=True)
class DistributionSampler:
    dist: DiscreteDistribution

    @property
    def n(self) -> int:
        return self.dist.n

    def draw(self, m, rng):
        return rng.multinomial(m, self.dist.probs)


@dataclass
class StreamSampler:
    """Consumes a pre-recorded sequence of symbol indices in order.

    Stateful: each draw advances the cursor, so a stream must not be shared
    between concurrent testers.
    """

    samples: np.ndarray
    n: int
    cursor: int = field(default=0)

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.int64)
        if s.ndim != 1:
            raise ValueError("sample stream must be 1-d")
        if s.size and (s.min() < 0 or s.max() >= self.n):
            raise ValueError(f"stream contains symbols outside [0, {self.n})")
        self.samples = s

    @property
    def remaining(self) -> int:
        return self.samples.size - self.cursor

    def draw(self, m, rng):
        if m > self.remaining:
            raise SamplerExhausted(f"requested {m} samples, only {self.remaining} left in stream")
        chunk = self.samples[self.cursor : self.cursor + m]
        self.cursor += m
        return np.bincount(chunk, minlength=self.n)


@dataclass(frozen=True)
class MixedSampler:
    """Channel realization of ``mix_uniform``: each sample is replaced by a
    uniform symbol with probability ``delta``."""

    base: Sampler
    delta: float

    def __post_init__(self):
        MixWeight(self.delta)

    @property
    def n(self) -> int:
        return self.base.n

    def draw(self, m, rng):
        k = int(rng.binomial(m, self.delta))
        counts = np.asarray(self.base.draw(m - k, rng), dtype=np.int64)
        if k:
            counts = counts + rng.multinomial(k, np.full(self.n, 1.0 / self.n))
        return counts


def as_sampler(source) -> Sampler:
    """Wrap a :class:`DiscreteDistribution` as a sampler; pass samplers through."""
    if isinstance(source, DiscreteDistribution):
        return DistributionSampler(source)
    if hasattr(source, "draw") and hasattr(source, "n"):
        return source
    raise TypeError(f"cannot sample from {type(source).__name__}")


def draw_fixed(sampler: Sampler, m: int, rng: np.random.Generator) -> Histogram:
    if m < 1:
        raise ValueError(f"sample budget must be at least 1, got {m}")
    return Histogram(sampler.draw(m, rng), nominal_m=m)


def draw_poisson(sampler: Sampler, m: int, rng: np.random.Generator) -> Histogram:
    """Draw ``Poisson(m)`` samples (capped at ``POISSON_CAP * m``).

    Conditioned on the total, the counts are multinomial, so uncapped
    counts are independent ``Poisson(m * p_i)`` variables.
    """
    if m < 1:
        raise ValueError(f"sample budget must be at least 1, got {m}")
    total = int(rng.poisson(m))
    cap = POISSON_CAP * m
    capped = total > cap
    return Histogram(sampler.draw(min(total, cap), rng), nominal_m=m, capped=capped)


def sample_fixed(dist: DiscreteDistribution, m: int, seed: SeedLike) -> Histogram:
    """Multinomial histogram of exactly ``m`` samples from ``dist``."""
    return draw_fixed(DistributionSampler(dist), m, make_rng(seed))


def sample_poisson(dist: DiscreteDistribution, m: int, seed: SeedLike) -> Histogram:
    """Histogram of ``Poisson(m)`` samples from ``dist``."""
    return draw_poisson(DistributionSampler(dist), m, make_rng(seed))
