"""Independent reference computations used by the tests.

Nothing here imports the statistic code under test. Distances are plain
Python loops; moments of the test statistics are exact sums against the
Poisson probability mass function, truncated far into the tail.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import stats

from disttest import DiscreteDistribution


def random_distribution(rng: np.random.Generator, n: int, zeros: float = 0.0) -> DiscreteDistribution:
    """Dirichlet draw with each entry zeroed independently with probability ``zeros``."""
    p = rng.dirichlet(np.full(n, rng.uniform(0.2, 3.0)))
    if zeros:
        keep = rng.random(n) >= zeros
        if not keep.any():
            keep[rng.integers(n)] = True
        p = np.where(keep, p, 0.0)
        if p.sum() == 0:
            p[np.flatnonzero(keep)[0]] = 1.0
        p = p / p.sum()
    return DiscreteDistribution(p)


# -- distances by loops -------------------------------------------------------


def tv_loop(p, q):
    return 0.5 * sum(abs(a - b) for a, b in zip(p, q))


def hellinger_loop(p, q):
    return math.sqrt(0.5 * sum((math.sqrt(a) - math.sqrt(b)) ** 2 for a, b in zip(p, q)))


def kl_loop(p, q):
    total = 0.0
    for a, b in zip(p, q):
        if a == 0:
            continue
        if b == 0:
            return math.inf
        total += a * math.log(a / b)
    return total


def chi2_loop(p, q):
    total = 0.0
    for a, b in zip(p, q):
        if a == b == 0:
            continue
        if b == 0:
            return math.inf
        total += (a - b) ** 2 / b
    return total


def l2_loop(p, q):
    return math.sqrt(sum((a - b) ** 2 for a, b in zip(p, q)))


def triangle_loop(p, q):
    return sum((a - b) ** 2 / (a + b) for a, b in zip(p, q) if a + b > 0)


# -- exact Poisson moments ----------------------------------------------------


def _support(lam: float) -> np.ndarray:
    hi = int(stats.poisson.isf(1e-16, lam)) + 20 if lam > 0 else 0
    return np.arange(hi + 1)


def zprime_moments(p, q, m2: float, heavy) -> tuple[float, float]:
    """Exact mean and variance of ``sum_{i in heavy} ((N_i - m2 q_i)^2 - N_i) / (m2 q_i)``.

    ``N_i ~ Poisson(m2 p_i)`` independently.
    """
    mean = var = 0.0
    for i in np.flatnonzero(heavy):
        lam, mu = m2 * p[i], m2 * q[i]
        k = _support(lam)
        w = stats.poisson.pmf(k, lam) if lam > 0 else (k == 0).astype(float)
        t = ((k - mu) ** 2 - k) / mu
        e1 = float(np.dot(w, t))
        mean += e1
        var += float(np.dot(w, t * t)) - e1 * e1
    return mean, var


def z_moments(p, q, m: float) -> tuple[float, float]:
    """Exact mean and variance of the two-sample statistic under Poisson(m) sampling."""
    mean = var = 0.0
    for a, b in zip(p, q):
        kx, ky = _support(m * a), _support(m * b)
        wx = stats.poisson.pmf(kx, m * a) if a > 0 else (kx == 0).astype(float)
        wy = stats.poisson.pmf(ky, m * b) if b > 0 else (ky == 0).astype(float)
        X, Y = np.meshgrid(kx, ky, indexing="ij")
        s = X + Y
        g = np.where(s > 0, ((X - Y) ** 2 - s) / np.where(s > 0, s, 1), 0.0)
        w = np.outer(wx, wy)
        e1 = float((w * g).sum())
        mean += e1
        var += float((w * g * g).sum()) - e1 * e1
    return mean, var
