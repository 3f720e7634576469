"""Monte Carlo experiments: repeated trials, parameter sweeps, CSV output.

Trial ``t`` of an experiment with seed ``s`` samples from the Philox
stream keyed by ``(s, 1, t)``, so results do not depend on how trials are
split across workers.
"""

from __future__ import annotations

import csv
import enum
import io
import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace

import numpy as np

from disttest.distributions import DistributionSampler, make_rng
from disttest.equivalence import EquivalenceConfig, Mode, test_equivalence_l2_vs_hellinger, test_equivalence_l2_vs_tv
from disttest.estimation import DistanceKind, EstimatorSpec, meta_test_from_estimator
from disttest.identity import (
    IdentityConfig,
    test_identity_chi2_vs_hellinger,
    test_identity_l2_vs_hellinger,
    test_identity_l2_vs_tv,
)
from disttest.instances import Family, InstanceSpec

WILSON_Z = 1.959963984540054

CSV_COLUMNS = (
    "family", "tester", "n", "epsilon", "C", "m", "trials", "accepts", "rejects",
    "rate", "ci_lo", "ci_hi", "mean_samples", "seconds",
)


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""


class Tester(enum.Enum):
    __test__ = False

    IDENTITY_CHI2_HELLINGER = "identity-chi2-hellinger"
    IDENTITY_L2_TV = "identity-l2-tv"
    IDENTITY_L2_HELLINGER = "identity-l2-hellinger"
    EQUIVALENCE_L2_TV = "equivalence-l2-tv"
    EQUIVALENCE_L2_HELLINGER = "equivalence-l2-hellinger"
    L2_ESTIMATION = "l2-estimation"
    META_TV = "meta-tv"


@dataclass(frozen=True)
class ExperimentConfig:
    """One tester run repeatedly on one fixed instance.

    ``epsilon`` is the tester's accuracy; ``instance_epsilon`` (default
    ``epsilon``) is the family's distance target, with 0 giving ``p = q``
    for the Paninski families. ``budget`` sets the per-side sample count
    of the estimation testers.
    """

    tester: Tester
    family: Family
    n: int
    epsilon: float
    trials: int = 200
    seed: int = 0
    instance_epsilon: float | None = None
    C: float = 4.0
    k1: float = 200.0
    K: float = 20.0
    sample_scale: float = 1.0
    budget: int | None = None
    workers: int = 1

    def __post_init__(self):
        try:
            object.__setattr__(self, "tester", Tester(self.tester))
            object.__setattr__(self, "family", Family(self.family))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.n < 1:
            raise ConfigError("n must be positive")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if self.family is Family.KL_UNTESTABLE and self.n != 2:
            raise ConfigError("kl-untestable instances need n = 2")

    @property
    def target(self) -> float:
        return self.epsilon if self.instance_epsilon is None else self.instance_epsilon

    def instance(self):
        """``(q, p)``: reference first, sampled distribution second."""
        try:
            return InstanceSpec(self.family, self.n, self.target, self.seed).build()
        except ValueError as exc:
            raise ConfigError(f"cannot build instance: {exc}") from None


@dataclass(frozen=True)
class TrialSummary:
    trials: int
    accept_count: int
    reject_count: int
    m: int
    mean_samples: float
    max_samples: int
    cap_events: int
    wall_time: float

    @property
    def accept_rate(self) -> float:
        return self.accept_count / self.trials

    @property
    def wilson_interval(self) -> tuple[float, float]:
        return wilson_interval(self.accept_count, self.trials)


def wilson_interval(successes: int, trials: int, z: float = WILSON_Z) -> tuple[float, float]:
    """Wilson score interval (95% by default) for a binomial proportion."""
    if trials < 1:
        raise ValueError("need at least one trial")
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


def run_trial(cfg: ExperimentConfig, q, p, trial: int):
    rng = make_rng(cfg.seed, 1, trial)
    t = cfg.tester
    if t in (Tester.IDENTITY_CHI2_HELLINGER, Tester.IDENTITY_L2_TV, Tester.IDENTITY_L2_HELLINGER):
        icfg = IdentityConfig(cfg.epsilon, C=cfg.C, k1=cfg.k1, sample_scale=cfg.sample_scale)
        fn = {
            Tester.IDENTITY_CHI2_HELLINGER: test_identity_chi2_vs_hellinger,
            Tester.IDENTITY_L2_TV: test_identity_l2_vs_tv,
            Tester.IDENTITY_L2_HELLINGER: test_identity_l2_vs_hellinger,
        }[t]
        return fn(DistributionSampler(p), q, icfg, rng)
    ps, qs = DistributionSampler(p), DistributionSampler(q)
    if t is Tester.EQUIVALENCE_L2_TV:
        return test_equivalence_l2_vs_tv(ps, qs, cfg.n, EquivalenceConfig(cfg.epsilon, cfg.C, Mode.TV, cfg.sample_scale), rng)
    if t is Tester.EQUIVALENCE_L2_HELLINGER:
        ecfg = EquivalenceConfig(cfg.epsilon, cfg.C, Mode.HELLINGER, cfg.sample_scale)
        return test_equivalence_l2_vs_hellinger(ps, qs, cfg.n, ecfg, rng)
    if t is Tester.L2_ESTIMATION:
        spec = EstimatorSpec(DistanceKind.L2, cfg.epsilon / 6, cfg.budget, cfg.n, cfg.K)
        return meta_test_from_estimator(spec, cfg.epsilon, cfg.epsilon, ps, qs, rng, target="y")
    eps1, eps2 = cfg.epsilon**2 / 4, cfg.epsilon / math.sqrt(2)
    spec = EstimatorSpec(DistanceKind.TV, eps1 / 4, cfg.budget, cfg.n)
    return meta_test_from_estimator(spec, eps1, eps2, ps, qs, rng)


def _run_chunk(cfg: ExperimentConfig, trials: list[int]):
    q, p = cfg.instance()
    out = []
    for t in trials:
        v = run_trial(cfg, q, p, t)
        out.append((t, v.accepted, v.samples_used, v.capped, v.m))
    return out


def run_experiment(cfg: ExperimentConfig) -> TrialSummary:
    """Run ``cfg.trials`` independent trials and aggregate them."""
    start = time.perf_counter()
    idx = list(range(cfg.trials))
    if cfg.workers == 1:
        rows = _run_chunk(cfg, idx)
    else:
        chunks = [idx[i :: cfg.workers] for i in range(cfg.workers)]
        with ProcessPoolExecutor(cfg.workers) as pool:
            rows = [r for part in pool.map(_run_chunk, [cfg] * len(chunks), chunks) for r in part]
    rows.sort()
    accepts = sum(r[1] for r in rows)
    samples = np.array([r[2] for r in rows], dtype=float)
    return TrialSummary(
        trials=cfg.trials,
        accept_count=accepts,
        reject_count=cfg.trials - accepts,
        m=max(r[4] for r in rows),
        mean_samples=float(samples.mean()),
        max_samples=int(samples.max()),
        cap_events=sum(r[3] for r in rows),
        wall_time=time.perf_counter() - start,
    )


SWEEP_KEYS = ("n", "epsilon", "C", "sample_scale")


def sweep(grid: dict, template: ExperimentConfig, timing: bool = False) -> list[dict]:
    """One CSV row per point of the product grid over ``n, epsilon, C, sample_scale``.

    Missing grid keys take the template's value. Rows come out in
    lexicographic grid order.
    """
    unknown = set(grid) - set(SWEEP_KEYS)
    if unknown:
        raise ConfigError(f"cannot sweep over {sorted(unknown)}")
    axes = [list(grid.get(k, [getattr(template, k)])) for k in SWEEP_KEYS]
    if any(len(a) == 0 for a in axes):
        raise ConfigError("sweep grid has an empty axis")
    rows = []
    for point in itertools.product(*axes):
        cfg = replace(template, **dict(zip(SWEEP_KEYS, point)))
        rows.append(summary_row(cfg, run_experiment(cfg), timing))
    return rows


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".10g")
    return str(x)


def summary_row(cfg: ExperimentConfig, s: TrialSummary, timing: bool = False) -> dict:
    lo, hi = s.wilson_interval
    row = {
        "family": cfg.family.value,
        "tester": cfg.tester.value,
        "n": cfg.n,
        "epsilon": float(cfg.epsilon),
        "C": float(cfg.C),
        "m": s.m,
        "trials": s.trials,
        "accepts": s.accept_count,
        "rejects": s.reject_count,
        "rate": s.accept_rate,
        "ci_lo": lo,
        "ci_hi": hi,
        "mean_samples": s.mean_samples,
        "seconds": round(s.wall_time, 3) if timing else "",
    }
    return {k: _fmt(v) for k, v in row.items()}


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


# -- config files -------------------------------------------------------------

_FIELD_TYPES = {
    "tester": str, "family": str, "n": int, "epsilon": float, "trials": int, "seed": int,
    "instance_epsilon": float, "C": float, "k1": float, "K": float, "sample_scale": float,
    "budget": int, "workers": int,
}
assert set(_FIELD_TYPES) == {f.name for f in fields(ExperimentConfig)}


def parse_config_text(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment. Duplicate or unknown keys are errors."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _convert(key: str, value: str):
    try:
        return _FIELD_TYPES[key](value)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {value!r}") from None


def config_from_mapping(mapping: dict[str, str], **overrides) -> ExperimentConfig:
    kwargs = {k: _convert(k, v) for k, v in mapping.items()}
    kwargs.update({k: v for k, v in overrides.items() if v is not None})
    missing = {"tester", "family", "n", "epsilon"} - set(kwargs)
    if missing:
        raise ConfigError(f"missing required keys: {sorted(missing)}")
    return ExperimentConfig(**kwargs)


def sweep_from_mapping(mapping: dict[str, str], **overrides) -> tuple[dict, ExperimentConfig]:
    """Split comma-separated sweep axes from scalar keys."""
    grid, scalars = {}, {}
    for k, v in mapping.items():
        if k in SWEEP_KEYS and "," in v:
            grid[k] = [_convert(k, item.strip()) for item in v.split(",") if item.strip()]
            scalars[k] = v.split(",")[0].strip()
        else:
            scalars[k] = v
    return grid, config_from_mapping(scalars, **overrides)

