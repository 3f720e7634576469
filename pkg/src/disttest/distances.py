"""Distances between distributions and between restrictions of distributions.

All functions take two mass vectors of equal length. They may be full
distributions or restrictions ``p_S, q_S`` (entries summing to at most one);
sums over the vectors are the sums over ``S``. Sums use :func:`math.fsum`.

KL and chi-squared return ``math.inf`` on a support violation rather than
raising.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from disttest.distributions import DiscreteDistribution

RESTRICTION_TOL = 1e-12


def _pair(p, q) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(p, Restriction) and q is None:
        return p.masses_p, p.masses_q
    p = p.probs if isinstance(p, DiscreteDistribution) else np.asarray(p, dtype=float)
    q = q.probs if isinstance(q, DiscreteDistribution) else np.asarray(q, dtype=float)
    if p.shape != q.shape or p.ndim != 1:
        raise ValueError(f"mismatched supports: {p.shape} vs {q.shape}")
    return p, q


@dataclass(frozen=True, eq=False)
class Restriction:
    """Copies of ``p`` and ``q`` restricted to the coordinates ``indices``."""

    indices: np.ndarray
    masses_p: np.ndarray
    masses_q: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        mp = np.array(self.masses_p, dtype=float)
        mq = np.array(self.masses_q, dtype=float)
        if not (idx.shape == mp.shape == mq.shape) or idx.ndim != 1:
            raise ValueError("indices and masses must be 1-d vectors of equal length")
        for name, v in (("p", mp), ("q", mq)):
            if np.any(v < 0):
                raise ValueError(f"restricted masses of {name} must be non-negative")
            if math.fsum(v) > 1.0 + RESTRICTION_TOL:
                raise ValueError(f"restricted masses of {name} sum to more than 1")
        for a in (idx, mp, mq):
            a.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "masses_p", mp)
        object.__setattr__(self, "masses_q", mq)


def restrict(p, q, indices) -> Restriction:
    """Restrict both distributions to ``indices`` (index array or boolean mask)."""
    p, q = _pair(p, q)
    idx = np.asarray(indices)
    idx = np.flatnonzero(idx) if idx.dtype == bool else idx.astype(np.int64)
    return Restriction(idx, p[idx], q[idx])


def tv(p, q=None) -> float:
    p, q = _pair(p, q)
    return 0.5 * math.fsum(np.abs(p - q))


def l2(p, q=None) -> float:
    p, q = _pair(p, q)
    return math.sqrt(math.fsum((p - q) ** 2))


def hellinger(p, q=None) -> float:
    p, q = _pair(p, q)
    return math.sqrt(0.5 * math.fsum((np.sqrt(p) - np.sqrt(q)) ** 2))


def kl(p, q=None) -> float:
    """KL divergence in nats, with ``0 log 0 = 0``."""
    p, q = _pair(p, q)
    on = p > 0
    if np.any(q[on] == 0):
        return math.inf
    return math.fsum(p[on] * np.log(p[on] / q[on]))


def chi2(p, q=None) -> float:
    p, q = _pair(p, q)
    on = (p > 0) | (q > 0)
    if np.any(q[on] == 0):
        return math.inf
    return math.fsum((p[on] - q[on]) ** 2 / q[on])


def triangle(p, q=None) -> float:
    """Triangle distance ``sum (p_i - q_i)^2 / (p_i + q_i)``."""
    p, q = _pair(p, q)
    s = p + q
    on = s > 0
    return math.fsum((p[on] - q[on]) ** 2 / s[on])


ALL_DISTANCES = {
    "tv": tv,
    "kl": kl,
    "hellinger": hellinger,
    "chi2": chi2,
    "l2": l2,
    "triangle": triangle,
}
