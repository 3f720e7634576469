"""Sublinear identity and equivalence testing of discrete distributions."""

from disttest.distributions import (
    DiscreteDistribution,
    DistributionSampler,
    Histogram,
    MixedSampler,
    MixWeight,
    StreamSampler,
    empirical,
    mix_uniform,
    sample_fixed,
    sample_poisson,
    uniform,
)
from disttest.distances import chi2, hellinger, kl, l2, restrict, triangle, tv
from disttest.verdict import Decision, TestVerdict

__all__ = [
    "DiscreteDistribution",
    "DistributionSampler",
    "Histogram",
    "MixedSampler",
    "MixWeight",
    "StreamSampler",
    "empirical",
    "mix_uniform",
    "sample_fixed",
    "sample_poisson",
    "uniform",
    "chi2",
    "hellinger",
    "kl",
    "l2",
    "restrict",
    "triangle",
    "tv",
    "Decision",
    "TestVerdict",
]

__version__ = "0.1.0"
