"""Identity and equivalence testing of discrete distributions from the command line.

Exit status: 0 on success, 1 on a configuration or usage error, 2 when a
run fails (e.g. a sample stream runs dry).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from disttest import io as dio
from disttest.distances import ALL_DISTANCES
from disttest.distributions import DistributionSampler, StreamSampler
from disttest.equivalence import EquivalenceConfig, Mode, test_equivalence_l2_vs_hellinger, test_equivalence_l2_vs_tv
from disttest.estimation import DistanceKind, EstimatorSpec, estimate_l2_distance, estimate_tv_plugin, median_of, meta_test_from_estimator
from disttest.harness import (
    config_from_mapping,
    parse_config_text,
    rows_to_csv,
    run_experiment,
    summary_row,
    sweep,
    sweep_from_mapping,
)
from disttest.identity import IdentityConfig, test_identity_chi2_vs_hellinger, test_identity_l2_vs_hellinger, test_identity_l2_vs_tv
from disttest.instances import Family, InstanceSpec


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _emit(pairs) -> None:
    for k, v in pairs:
        sys.stdout.write(f"{k}={v!r}\n" if isinstance(v, float) else f"{k}={v}\n")


def _sampler(path, samples_path, n=None):
    if (path is None) == (samples_path is None):
        raise UsageError("give exactly one of a distribution file or a sample-stream file")
    if path is not None:
        return DistributionSampler(dio.load_distribution(path))
    samples = dio.load_samples(samples_path)
    if n is None:
        raise UsageError("sample streams need --n")
    return StreamSampler(samples, n)


def _verdict_lines(v):
    _emit([
        ("verdict", str(v.decision)),
        ("statistic", float(v.statistic)),
        ("threshold", float(v.threshold)),
        ("stage", v.stage),
        ("m", v.m),
        ("samples_used", v.samples_used),
    ])


def cmd_dist(args):
    p, q = dio.load_distribution(args.p), dio.load_distribution(args.q)
    if p.n != q.n:
        raise UsageError(f"distributions have different supports ({p.n} vs {q.n})")
    _emit((name, float(fn(p, q))) for name, fn in ALL_DISTANCES.items())


def cmd_instance(args):
    q, p = InstanceSpec(Family(args.family), args.n, args.epsilon, args.seed).build()
    if args.out_q or args.out_p:
        if not (args.out_q and args.out_p):
            raise UsageError("give both --out-q and --out-p")
        dio.save_distribution(q, args.out_q)
        dio.save_distribution(p, args.out_p)
    else:
        sys.stdout.write("q=" + ",".join(repr(x) for x in q.probs.tolist()) + "\n")
        sys.stdout.write("p=" + ",".join(repr(x) for x in p.probs.tolist()) + "\n")


def cmd_test_identity(args):
    q = dio.load_distribution(args.q)
    ps = _sampler(args.p, args.p_samples, q.n)
    if ps.n != q.n:
        raise UsageError("p and q have different supports")
    cfg = IdentityConfig(args.epsilon, C=args.C, k1=args.k1)
    fn = {
        "chi2-hellinger": test_identity_chi2_vs_hellinger,
        "l2-tv": test_identity_l2_vs_tv,
        "l2-hellinger": test_identity_l2_vs_hellinger,
    }[args.mode]
    _verdict_lines(fn(ps, q, cfg, args.seed))


def cmd_test_equivalence(args):
    ps = _sampler(args.p, args.p_samples, args.n)
    qs = _sampler(args.q, args.q_samples, args.n)
    n = args.n or ps.n
    if args.mode == "l2-tv":
        v = test_equivalence_l2_vs_tv(ps, qs, n, EquivalenceConfig(args.epsilon, args.C, Mode.TV), args.seed)
    else:
        v = test_equivalence_l2_vs_hellinger(ps, qs, n, EquivalenceConfig(args.epsilon, args.C, Mode.HELLINGER), args.seed)
    _verdict_lines(v)


def cmd_test_meta(args):
    ps = _sampler(args.p, args.p_samples, args.n)
    qs = _sampler(args.q, args.q_samples, args.n)
    n = args.n or ps.n
    accuracy = args.eps1 / 4 if args.target == "x" else args.eps2 / 6
    spec = EstimatorSpec(DistanceKind(args.distance), accuracy, args.budget, n, repeats=args.repeats)
    _verdict_lines(meta_test_from_estimator(spec, args.eps1, args.eps2, ps, qs, args.seed, target=args.target))


def cmd_estimate(args):
    ps = _sampler(args.p, args.p_samples, args.n)
    qs = _sampler(args.q, args.q_samples, args.n)
    if args.distance == "tv":
        if args.m is None:
            raise UsageError("--distance tv needs --m (samples per side)")
        est = lambda a, b, s: estimate_tv_plugin(a, b, args.m, s)  # noqa: E731
    else:
        if args.epsilon is None:
            raise UsageError("--distance l2 needs --epsilon")
        est = lambda a, b, s: estimate_l2_distance(a, b, args.epsilon, s)  # noqa: E731
    if args.repeats > 1:
        est = median_of(est, args.repeats)
    _emit([("distance", args.distance), ("estimate", float(est(ps, qs, args.seed)))])


def _overrides(args):
    return {k: getattr(args, k) for k in ("seed", "trials", "C", "epsilon", "n") if getattr(args, k) is not None}


def _write_csv(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_simulate(args):
    cfg = config_from_mapping(parse_config_text(Path(args.config).read_text()), **_overrides(args))
    _write_csv(rows_to_csv([summary_row(cfg, run_experiment(cfg), args.timing)]), args.out)


def cmd_sweep(args):
    grid, template = sweep_from_mapping(parse_config_text(Path(args.config).read_text()), **_overrides(args))
    _write_csv(rows_to_csv(sweep(grid, template, args.timing)), args.out)


def _add_sources(p):
    p.add_argument("--p", help="distribution file for p (sampled internally)")
    p.add_argument("--p-samples", help="file of 0-based sample indices from p")
    p.add_argument("--q", help="distribution file for q")
    p.add_argument("--q-samples", help="file of 0-based sample indices from q")
    p.add_argument("--n", type=int, help="support size (required with sample streams)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="disttest", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("dist", help="print all distances between two distribution files")
    p.add_argument("p")
    p.add_argument("q")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("instance", help="write an instance pair to distribution files")
    p.add_argument("--family", required=True, choices=[f.value for f in Family])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-q")
    p.add_argument("--out-p")
    p.set_defaults(func=cmd_instance)

    test = sub.add_parser("test", help="run a tester once")
    tsub = test.add_subparsers(dest="kind", required=True, parser_class=_Parser)

    p = tsub.add_parser("identity")
    p.add_argument("--mode", required=True, choices=["chi2-hellinger", "l2-tv", "l2-hellinger"])
    p.add_argument("--q", required=True, help="explicit reference distribution file")
    p.add_argument("--p", help="distribution file for p (sampled internally)")
    p.add_argument("--p-samples", help="file of 0-based sample indices from p")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--C", type=float, default=4.0)
    p.add_argument("--k1", type=float, default=200.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_test_identity)

    p = tsub.add_parser("equivalence")
    p.add_argument("--mode", required=True, choices=["l2-tv", "l2-hellinger"])
    _add_sources(p)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--C", type=float, default=4.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_test_equivalence)

    p = tsub.add_parser("meta", help="threshold a distance estimate")
    p.add_argument("--distance", required=True, choices=["tv", "l2"])
    p.add_argument("--eps1", type=float, required=True)
    p.add_argument("--eps2", type=float, required=True)
    p.add_argument("--target", choices=["x", "y"], default="x", help="estimated distance is d_X (x) or d_Y (y)")
    p.add_argument("--budget", type=int, help="samples per side (default: derived)")
    p.add_argument("--repeats", type=int, default=1, help="median over this many estimates")
    _add_sources(p)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_test_meta)

    p = sub.add_parser("estimate", help="estimate a distance from samples")
    p.add_argument("--distance", required=True, choices=["tv", "l2"])
    p.add_argument("--m", type=int, help="samples per side for the plug-in TV estimate")
    p.add_argument("--epsilon", type=float, help="additive error for the l2 estimate")
    p.add_argument("--repeats", type=int, default=1)
    _add_sources(p)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_estimate)

    for name, func, helptext in (
        ("simulate", cmd_simulate, "run one experiment from a key=value config file"),
        ("sweep", cmd_sweep, "run a grid of experiments; comma-separated n/epsilon/C/sample_scale"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("config")
        p.add_argument("--seed", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--C", type=float)
        p.add_argument("--epsilon", type=float)
        p.add_argument("--n", type=int)
        p.add_argument("--out", help="CSV output path (default stdout)")
        p.add_argument("--timing", action="store_true", help="fill the seconds column (output is then not reproducible)")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ValueError, UsageError, OSError) as exc:
        print(f"disttest: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"disttest: run failed: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
