"""Instance families: calibrated close pairs and hard far pairs.

Constructors that build a perturbation of a reference return
``(reference, perturbed)``; in identity testing the first element is the
known ``q`` and the second the sampled ``p``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from disttest.distributions import DiscreteDistribution, make_rng, uniform


class Family(enum.Enum):
    PANINSKI = "paninski"
    PANINSKI_HELLINGER = "paninski-hellinger"
    L2_NEAR = "l2-near"
    HELLINGER_FAR_BLOCKS = "hellinger-far-blocks"
    KL_UNTESTABLE = "kl-untestable"
    CHI2_REDUCTION = "chi2-reduction"


@dataclass(frozen=True)
class InstanceSpec:
    """A family name and its parameters; :meth:`build` returns ``(q, p)``.

    ``epsilon`` is the family's distance target: TV for ``paninski``,
    Hellinger for ``paninski-hellinger`` and ``hellinger-far-blocks``, l2
    for ``l2-near`` and the deviation ``delta`` for ``kl-untestable``.
    ``chi2-reduction`` applies the reduction to a Paninski pair at TV
    ``epsilon``.
    """

    family: Family
    n: int
    epsilon: float
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))

    def build(self) -> tuple[DiscreteDistribution, DiscreteDistribution]:
        f, n, eps, seed = self.family, self.n, self.epsilon, self.seed
        if f is Family.PANINSKI:
            return paninski_pair(n, eps, seed)
        if f is Family.PANINSKI_HELLINGER:
            return paninski_pair(n, paninski_tv_for_hellinger(eps), seed)
        if f is Family.L2_NEAR:
            return l2_near_pair(n, eps, seed)
        if f is Family.HELLINGER_FAR_BLOCKS:
            return hellinger_far_blocks(n, eps, seed)
        if f is Family.KL_UNTESTABLE:
            if n != 2:
                raise ValueError("kl-untestable instances live on n = 2")
            return kl_untestable_pair(eps)
        q, p = paninski_pair(n, eps, seed)
        p2, q2 = chi2_reduction(p, q)
        return q2, p2


def _pair_signs(n: int, seed) -> np.ndarray:
    rng = make_rng(seed)
    signs = rng.choice([-1.0, 1.0], size=n // 2)
    return np.stack([signs, -signs], axis=1).ravel()


def paninski_pair(n: int, epsilon: float, seed=0) -> tuple[DiscreteDistribution, DiscreteDistribution]:
    """Return ``(uniform(n), p)`` with ``p_i = (1 +/- 2 eps) / n``.

    Signs are opposite within each adjacent pair ``(2j, 2j+1)`` and random
    across pairs, so ``tv(p, uniform) = eps`` exactly.
    """
    if n < 2 or n % 2:
        raise ValueError(f"Paninski instances need an even support size, got {n}")
    if not 0 <= epsilon <= 0.5:
        raise ValueError(f"epsilon must lie in [0, 1/2], got {epsilon}")
    p = (1.0 + 2.0 * epsilon * _pair_signs(n, seed)) / n
    return uniform(n), DiscreteDistribution(p)


def paninski_tv_for_hellinger(h: float) -> float:
    """TV parameter of the Paninski pair whose Hellinger distance is ``h``.

    For perturbation ``a = 2 tv`` the pair has
    ``d_H^2 = 1 - (sqrt(1+a) + sqrt(1-a)) / 2``, which inverts in closed form.
    """
    hmax = math.sqrt(1 - math.sqrt(2) / 2)
    if not 0 <= h <= hmax:
        raise ValueError(f"Paninski pairs reach Hellinger distance at most {hmax:.6f}")
    s = 2 * (1 - h * h)
    c = s * s / 2 - 1
    return math.sqrt(max(0.0, 1 - c * c)) / 2


def l2_near_pair(n: int, target_l2: float, seed=0) -> tuple[DiscreteDistribution, DiscreteDistribution]:
    """Return ``(uniform(n), p)`` with ``l2(p, uniform) = target_l2``.

    Mass ``target / sqrt(2)`` moves from one coordinate to another. When
    that would drive an entry negative, the shift is split evenly over the
    fewest disjoint coordinate pairs ``k`` that keep every entry in
    ``[0, 2/n]`` (each pair moves ``target / sqrt(2k)``).
    """
    if target_l2 < 0:
        raise ValueError("target l2 distance must be non-negative")
    q = uniform(n)
    if target_l2 == 0:
        return q, q
    if n < 2:
        raise ValueError("need at least two symbols to shift mass")
    k = max(1, math.ceil(target_l2**2 * n * n / 2 * (1 - 1e-12)))
    if k > n // 2:
        raise ValueError(f"l2 distance {target_l2} is not reachable from uniform({n}) by pair shifts")
    shift = target_l2 / math.sqrt(2 * k)
    perm = make_rng(seed).permutation(n)
    p = q.probs.copy()
    p[perm[:k]] += shift
    p[perm[k : 2 * k]] -= shift
    return q, DiscreteDistribution(np.clip(p, 0.0, None))


def hellinger_far_blocks(n: int, epsilon: float, seed=0) -> tuple[DiscreteDistribution, DiscreteDistribution]:
    """Return ``(q, p)`` with ``hellinger(p, q) >= epsilon``.

    A random half ``B`` of the symbols carries no ``q`` mass; ``p`` puts
    ``2 eps^2`` uniformly on ``B`` and the rest uniformly on the other
    half, where ``q`` is uniform. The mass on ``B`` alone contributes
    ``eps^2`` to ``d_H^2``.
    """
    if n < 2:
        raise ValueError("need at least two symbols")
    w = 2 * epsilon**2
    if not 0 <= w <= 1:
        raise ValueError(f"need 2 eps^2 <= 1, got eps={epsilon}")
    if epsilon == 0:
        return uniform(n), uniform(n)
    perm = make_rng(seed).permutation(n)
    block, rest = perm[: n // 2], perm[n // 2 :]
    q = np.zeros(n)
    q[rest] = 1.0 / rest.size
    p = np.zeros(n)
    p[block] = w / block.size
    p[rest] = (1 - w) / rest.size
    return DiscreteDistribution(q), DiscreteDistribution(p)


def kl_untestable_pair(delta: float) -> tuple[DiscreteDistribution, DiscreteDistribution]:
    """Return ``q = (1, 0)`` and ``p = (1 - delta, delta)``: infinite KL, TV ``delta``."""
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    return DiscreteDistribution([1.0, 0.0]), DiscreteDistribution([1.0 - delta, delta])


def chi2_reduction(p: DiscreteDistribution, q: DiscreteDistribution) -> tuple[DiscreteDistribution, DiscreteDistribution]:
    """Return ``p' = 2/3 p + 1/3 q`` and ``q' = 1/3 p + 2/3 q``.

    Guarantees ``p'_i <= 2 q'_i``, so chi-squared and squared Hellinger
    between the outputs agree up to a factor 12, while TV shrinks by 3.
    """
    if p.n != q.n:
        raise ValueError(f"mismatched supports: {p.n} vs {q.n}")
    return (
        DiscreteDistribution(2 / 3 * p.probs + 1 / 3 * q.probs),
        DiscreteDistribution(1 / 3 * p.probs + 2 / 3 * q.probs),
    )
