"""Plain-text files for distributions, histograms and sample streams.

A file holds one vector: either one value per line or a single row
delimited by commas and/or whitespace. Lines starting with ``#`` are
ignored. Sample streams list 0-based symbol indices the same way.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from disttest.distributions import DiscreteDistribution, Histogram

_SPLIT = re.compile(r"[,\s]+")


def _tokens(text: str) -> list[str]:
    body = "\n".join(line for line in text.splitlines() if not line.lstrip().startswith("#"))
    return [t for t in _SPLIT.split(body) if t]


def parse_vector(text: str, dtype=float) -> np.ndarray:
    toks = _tokens(text)
    if not toks:
        raise ValueError("empty vector")
    try:
        if dtype is int:
            return np.array([int(t) for t in toks], dtype=np.int64)
        return np.array([float(t) for t in toks], dtype=float)
    except ValueError as exc:
        raise ValueError(f"malformed vector entry: {exc}") from None


def format_vector(values) -> str:
    return "".join(f"{v!r}\n" for v in np.asarray(values).tolist())


def load_distribution(path) -> DiscreteDistribution:
    return DiscreteDistribution(parse_vector(Path(path).read_text()))


def save_distribution(dist: DiscreteDistribution, path) -> None:
    Path(path).write_text(format_vector(dist.probs))


def load_histogram(path, nominal_m: int | None = None) -> Histogram:
    counts = parse_vector(Path(path).read_text(), dtype=int)
    return Histogram(counts, nominal_m=int(counts.sum()) if nominal_m is None else nominal_m)


def save_histogram(hist: Histogram, path) -> None:
    Path(path).write_text(format_vector(hist.counts))


def load_samples(path) -> np.ndarray:
    return parse_vector(Path(path).read_text(), dtype=int)
