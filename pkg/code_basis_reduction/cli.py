from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Sequence

from code_basis_reduction import settings
from code_basis_reduction.backward import default_tau
from code_basis_reduction.bench import (
    ALGORITHMS,
    ExperimentConfig,
    ExperimentRunner,
    run_reduction,
    sample_random_code,
    verify_trial,
)
from code_basis_reduction.bounds import (
    bkz_output_bound,
    full_backward_output_bound,
    griesmer_inverse,
    slide_output_bound,
)
from code_basis_reduction.domain import fundamental_weight_distribution
from code_basis_reduction.exceptions import CodeReductionError, UsageError
from code_basis_reduction.linalg import k1, k1_star, read_matrix, systematize, write_matrix
from code_basis_reduction.reduce import EXHAUSTIVE, LEE_BRICKELL

logger = logging.getLogger(__name__)


def _add_reduce_parser(subparsers: Any) -> None:
    parser = subparsers.add_parser("reduce", help="reduce one basis")
    parser.add_argument("--alg", required=True, choices=ALGORITHMS)
    parser.add_argument("--beta", type=int)
    parser.add_argument("--tau", type=int)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--q", type=int, default=2)
    parser.add_argument("--n", type=int)
    parser.add_argument("--k", type=int)
    parser.add_argument("--in", dest="input", help="generator matrix file with a 'q k n' header")
    parser.add_argument("--out", help="write the reduced matrix here")
    parser.add_argument("--report", help="write a JSON summary here")
    parser.add_argument("--oracle", choices=(EXHAUSTIVE, LEE_BRICKELL), default=EXHAUSTIVE)
    parser.add_argument("--lb-budget", type=int)
    parser.add_argument(
        "--skip-threshold",
        type=int,
        help=f"approxgriesmer only, defaults to {settings.APPROX_GRIESMER_SKIP_THRESHOLD}",
    )
    parser.add_argument("--lll-after", action="store_true")
    parser.add_argument("--cap", type=int)


def _add_wdist_parser(subparsers: Any) -> None:
    parser = subparsers.add_parser("wdist", help="weight distribution of a fundamental domain")
    parser.add_argument("--q", type=int, required=True)
    parser.add_argument("--profile", required=True, help="comma separated epipodal lengths")
    parser.add_argument("--n", type=int, help="code length, defaults to the profile sum")
    parser.add_argument("--out", help="write the JSON here instead of stdout")


def _add_bound_parser(subparsers: Any) -> None:
    parser = subparsers.add_parser("bound", help="largest first epipodal length allowed")
    parser.add_argument("--alg", required=True, choices=("lll", "bkz", "slide", "fullbackward"))
    parser.add_argument("--q", type=int, required=True)
    parser.add_argument("--n", type=int, required=True)
    parser.add_argument("--k", type=int, required=True)
    parser.add_argument("--beta", type=int)
    parser.add_argument("--tau", type=int)


def _add_bench_parser(subparsers: Any) -> None:
    parser = subparsers.add_parser("bench", help="benchmark experiments")
    bench_subparsers = parser.add_subparsers(dest="bench_command", required=True)
    run = bench_subparsers.add_parser("run", help="run an experiment from a TOML file")
    run.add_argument("--config", required=True)
    run.add_argument("--n", type=int)
    run.add_argument("--k", type=int)
    run.add_argument("--trials", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--workers", type=int)
    run.add_argument("--report")
    run.add_argument("--csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="code-basis-reduction", description="Basis reduction for linear codes over F_q"
    )
    parser.add_argument("--log-level", default=settings.LOG_LEVEL)
    subparsers = parser.add_subparsers(dest="command", required=True)
    _add_reduce_parser(subparsers)
    _add_wdist_parser(subparsers)
    _add_bound_parser(subparsers)
    _add_bench_parser(subparsers)
    return parser


def _skip_threshold(args: argparse.Namespace) -> int:
    if args.skip_threshold is not None:
        return args.skip_threshold
    return settings.APPROX_GRIESMER_SKIP_THRESHOLD if args.alg == "approxgriesmer" else 0


def _reduce(args: argparse.Namespace) -> int:
    systematic = args.alg != "selective"
    if args.input:
        basis = read_matrix(args.input)
        if systematic and not basis.is_proper():
            logger.info("input basis is not proper, systematizing it first")
            basis = systematize(basis)
    else:
        if args.n is None:
            raise UsageError("Give either --in or --n (with optional --k, --q)")
        k = args.k if args.k is not None else args.n // 2
        basis = sample_random_code(args.q, k, args.n, args.seed, systematic)

    config = ExperimentConfig(
        algorithm=args.alg,
        q=basis.field.q,
        n=basis.n,
        k=basis.k,
        beta=args.beta,
        tau=args.tau,
        trials=1,
        seed=args.seed,
        oracle=args.oracle,
        lb_budget=args.lb_budget,
        skip_threshold=_skip_threshold(args),
        lll_after=args.lll_after,
        cap=args.cap,
    )
    start = time.perf_counter()
    outcome = run_reduction(basis, config, args.seed)
    seconds = time.perf_counter() - start
    profile = outcome.basis.profile()
    summary = {
        "algorithm": args.alg,
        "profile": profile,
        "l1": profile[0],
        "k1": k1(profile),
        "k1_star": k1_star(profile),
        "counters": outcome.counters.as_dict(),
        "seconds": seconds,
        "checks": verify_trial(basis, outcome, config),
    }
    if outcome.word is not None:
        summary["word"] = outcome.word.coords()
        summary["word_weight"] = outcome.word.weight
    if args.out:
        write_matrix(args.out, outcome.basis)
    if args.report:
        Path(args.report).write_text(json.dumps(summary, indent=2) + "\n")
    print(f"l1={summary['l1']} k1={summary['k1']} k1*={summary['k1_star']} profile={profile}")
    return 0


def _wdist(args: argparse.Namespace) -> int:
    if args.q > settings.WDIST_MAX_Q:
        raise UsageError(f"Weight distributions are offered for q <= {settings.WDIST_MAX_Q}")
    try:
        profile = [int(length) for length in args.profile.split(",") if length.strip()]
    except ValueError as e:
        raise UsageError(f"Unsupported profile: {args.profile}") from e
    distribution = fundamental_weight_distribution(profile, args.q, args.n)
    text = json.dumps(distribution.to_json(), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _bound(args: argparse.Namespace) -> int:
    if args.alg in ("bkz", "slide") and args.beta is None:
        raise UsageError(f"--beta is required for {args.alg}")
    if args.alg == "lll":
        value = griesmer_inverse(args.q, args.n, args.k)
    elif args.alg == "bkz":
        value = bkz_output_bound(args.q, args.n, args.k, args.beta)
    elif args.alg == "slide":
        value = slide_output_bound(args.q, args.n, args.k, args.beta)
    else:
        tau = args.tau if args.tau is not None else min(default_tau(args.q, args.n), args.k)
        value = full_backward_output_bound(args.q, args.n, args.k, tau)
    print(value)
    return 0


def _bench(args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_toml(args.config).with_overrides(
        n=args.n,
        k=args.k,
        trials=args.trials,
        seed=args.seed,
        workers=args.workers,
        report=args.report,
        csv=args.csv,
    )
    for single in config.expand():
        report = ExperimentRunner(single).execute()
        aggregates = report.aggregates()
        print(
            f"{single.algorithm} q={single.q} n={single.n} k={single.dimension}: "
            f"sorted l1 {aggregates['sorted_l1']['mean']:.1f} "
            f"(2 sigma {aggregates['sorted_l1']['two_sigma']:.1f}), "
            f"k1 {aggregates['k1']['mean']:.1f}, failures {aggregates['failures']}"
        )
    return 0


COMMANDS = {"reduce": _reduce, "wdist": _wdist, "bound": _bound, "bench": _bench}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=args.log_level.upper(), format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )
    try:
        return COMMANDS[args.command](args)
    except CodeReductionError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
