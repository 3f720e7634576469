"""Testing by estimation.

Any estimator of a distance ``d_X`` accurate to ``eps1 / 4`` becomes a
tester for ``d_X <= eps1`` versus ``d_Y >= eps2`` whenever the second case
forces ``d_X > 3 eps1 / 2``: accept iff the estimate is at most
``5 eps1 / 4``. Estimating ``d_Y`` instead works the same way at
accuracy ``eps2 / 6`` with the strict rule ``estimate < 5 eps2 / 6``.

The TV estimator here is the plug-in one (distance between empirical
distributions). It needs ``O(n / eps^2)`` samples, more than the
``O(n / log n)`` of polynomial-approximation estimators.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from disttest.distances import l2, tv
from disttest.distributions import (
    DiscreteDistribution,
    SeedLike,
    as_sampler,
    draw_fixed,
    empirical,
    make_rng,
)
from disttest.verdict import Decision, TestVerdict

#: ``learn_l2`` draws ``ceil(K / eps^2)`` samples.
DEFAULT_K = 20.0

Estimator = Callable[..., float]


class DistanceKind(enum.Enum):
    TV = "tv"
    L2 = "l2"


def learn_l2(sampler, epsilon: float, seed: SeedLike, K: float = DEFAULT_K) -> DiscreteDistribution:
    """Empirical distribution of ``ceil(K / eps^2)`` samples.

    ``E[l2(p_hat, p)^2] <= 1/m``, so by Markov the result is within
    ``epsilon`` of ``p`` in l2 with probability at least ``1 - 1/K``.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    return _learn(sampler, math.ceil(K / epsilon**2), make_rng(seed))


def _learn(sampler, m: int, rng) -> DiscreteDistribution:
    return empirical(draw_fixed(as_sampler(sampler), m, rng))


def estimate_l2_distance(p_sampler, q_sampler, epsilon: float, seed: SeedLike, K: float = DEFAULT_K) -> float:
    """l2 distance between two ``epsilon/2``-learners; off by at most ``epsilon`` when both succeed."""
    rng = make_rng(seed)
    return l2(learn_l2(p_sampler, epsilon / 2, rng, K), learn_l2(q_sampler, epsilon / 2, rng, K))


def estimate_tv_plugin(p_sampler, q_sampler, m: int, seed: SeedLike) -> float:
    """TV between the empirical distributions of ``m`` samples from each side."""
    if m < 1:
        raise ValueError("sample budget must be at least 1")
    rng = make_rng(seed)
    p_hat = empirical(draw_fixed(as_sampler(p_sampler), m, rng))
    q_hat = empirical(draw_fixed(as_sampler(q_sampler), m, rng))
    return tv(p_hat, q_hat)


def tv_plugin_budget(n: int, additive_error: float) -> int:
    """Samples per side so the plug-in TV error is at most ``additive_error`` w.p. 2/3.

    ``E|p_hat_i - p_i| <= sqrt(p_i / m)``, so by Cauchy-Schwarz the expected
    TV error of one side is at most ``sqrt(n / m) / 2``; two sides plus
    Markov at 1/3 give ``m = 9 n / additive_error^2``.
    """
    return math.ceil(9 * n / additive_error**2)


@dataclass(frozen=True)
class EstimatorSpec:
    """Which distance to estimate, to what additive error, from how many samples.

    ``sample_budget`` is per distribution. When omitted it is derived from
    ``additive_error`` (and ``n`` for TV). ``repeats > 1`` reports the
    median of that many independent estimates.
    """

    distance_kind: DistanceKind
    additive_error: float
    sample_budget: int | None = None
    n: int | None = None
    K: float = DEFAULT_K
    repeats: int = 1

    def __post_init__(self):
        object.__setattr__(self, "distance_kind", DistanceKind(self.distance_kind))
        if not self.additive_error > 0:
            raise ValueError("additive_error must be positive")
        if self.repeats < 1:
            raise ValueError("repeats must be at least 1")
        if self.sample_budget is None and self.distance_kind is DistanceKind.TV and self.n is None:
            raise ValueError("TV budget derivation needs the support size n")

    @property
    def budget(self) -> int:
        if self.sample_budget is not None:
            return self.sample_budget
        if self.distance_kind is DistanceKind.L2:
            return math.ceil(self.K / (self.additive_error / 2) ** 2)
        return tv_plugin_budget(self.n, self.additive_error)

    def with_error(self, additive_error: float) -> "EstimatorSpec":
        """Same estimator retargeted; an explicit ``sample_budget`` is kept."""
        return EstimatorSpec(self.distance_kind, additive_error, self.sample_budget, self.n, self.K, self.repeats)

    def estimate(self, p_sampler, q_sampler, seed: SeedLike) -> float:
        rng = make_rng(seed)
        vals = [self._once(p_sampler, q_sampler, rng) for _ in range(self.repeats)]
        return float(np.median(vals))

    def _once(self, p_sampler, q_sampler, rng) -> float:
        if self.distance_kind is DistanceKind.TV:
            return estimate_tv_plugin(p_sampler, q_sampler, self.budget, rng)
        return l2(_learn(p_sampler, self.budget, rng), _learn(q_sampler, self.budget, rng))

    def __call__(self, p_sampler, q_sampler, seed: SeedLike) -> float:
        return self.estimate(p_sampler, q_sampler, seed)


def median_of(estimator: Estimator, k: int = 9) -> Estimator:
    """Boost a 2/3-reliable estimator by reporting the median of ``k`` runs."""

    def boosted(p_sampler, q_sampler, seed):
        rng = make_rng(seed)
        return float(np.median([estimator(p_sampler, q_sampler, rng) for _ in range(k)]))

    return boosted


def meta_test_from_estimator(
    estimator: EstimatorSpec | Estimator,
    eps1: float,
    eps2: float,
    p_sampler,
    q_sampler,
    seed: SeedLike,
    target: str = "x",
) -> TestVerdict:
    """Test ``d_X <= eps1`` versus ``d_Y >= eps2`` with an estimator of one side.

    The caller vouches for the separation ``d_Y >= eps2 => d_X > 3 eps1/2``
    and ``d_X <= eps1 => d_Y < 2 eps2/3``; it cannot be checked from samples.
    An :class:`EstimatorSpec` is retargeted to accuracy ``eps1 / 4`` (or
    ``eps2 / 6`` when ``target="y"``); a bare callable is used as given.
    """
    if eps1 <= 0 or eps2 <= 0:
        raise ValueError("eps1 and eps2 must be positive")
    if target == "x":
        accuracy, threshold = eps1 / 4, 5 * eps1 / 4
    elif target == "y":
        accuracy, threshold = eps2 / 6, 5 * eps2 / 6
    else:
        raise ValueError("target must be 'x' or 'y'")
    if isinstance(estimator, EstimatorSpec):
        spec = estimator.with_error(accuracy) if estimator.additive_error != accuracy else estimator
        tau = spec.estimate(p_sampler, q_sampler, seed)
        used = 2 * spec.budget * spec.repeats
    else:
        tau = float(estimator(p_sampler, q_sampler, seed))
        used = 0
    accept = tau <= threshold if target == "x" else tau < threshold
    return TestVerdict(Decision.ACCEPT if accept else Decision.REJECT, tau, threshold, "main", used // 2, used)
