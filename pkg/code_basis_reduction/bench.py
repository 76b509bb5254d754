"""
Random codes, experiment configuration, trial execution and reports.

Random matrices come from numpy's Philox counter-based generator, so a seed names the
same code on every platform. Trial t of an experiment uses seed `config.seed + t`.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path
from typing import Any, Mapping, Sequence

import galois
import numpy as np

from code_basis_reduction import settings
from code_basis_reduction.backward import (
    default_tau,
    full_backward_reduce,
    is_fully_backward_reduced,
    selective_backward_reduce,
)
from code_basis_reduction.bounds import (
    bkz_output_bound,
    full_backward_check,
    lll_decay_check,
    lll_griesmer_check,
    one_block_check,
    slide_output_bound,
    twin_reduction_check,
)
from code_basis_reduction.exceptions import CodeReductionError, SelectionFailure, UsageError
from code_basis_reduction.gf import FieldSpec
from code_basis_reduction.linalg import CodeBasis, Word, k1, k1_star, systematize
from code_basis_reduction.proper import insert_primitive, make_primitive
from code_basis_reduction.reduce import (
    EXHAUSTIVE,
    LEE_BRICKELL,
    IterationCounters,
    ShortestOracle,
    approx_griesmer_reduce,
    bkz_reduce,
    is_bkz_reduced,
    is_griesmer_reduced,
    is_slide_reduced,
    lll_reduce,
    one_block_reduce,
    slide_reduce,
)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = logging.getLogger(__name__)

ALGORITHMS = ("lll", "bkz", "slide", "fullbackward", "selective", "oneblock", "approxgriesmer")
NEEDS_BETA = ("bkz", "slide", "selective", "oneblock")


def sample_full_rank(
    field: FieldSpec, k: int, n: int, rng: np.random.Generator
) -> tuple[galois.FieldArray, int]:
    """
    Uniform k x n matrix of rank k, redrawn until full rank. Returns the matrix and the
    number of draws it took.
    """
    attempts = 0
    while True:
        attempts += 1
        matrix = field.array_type.Random((k, n), seed=rng)
        if np.linalg.matrix_rank(matrix) == k:
            return matrix, attempts
        logger.debug("resampling rank-deficient %dx%d matrix over %s", k, n, field)


def sample_random_code(
    q: int, k: int, n: int, seed: int | Sequence[int], systematic: bool = True
) -> CodeBasis:
    if not 1 <= k <= n:
        raise UsageError(f"Unsupported code dimensions: k={k}, n={n}")
    field = FieldSpec.from_order(q)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    matrix, _ = sample_full_rank(field, k, n, rng)
    basis = CodeBasis.from_matrix(field, matrix.view(np.ndarray), n=n)
    return systematize(basis) if systematic else basis


@dataclass(frozen=True)
class ExperimentConfig:
    """
    One experiment: `trials` random [n, k]_q codes reduced by `algorithm`. A TOML `n`
    given as a list becomes `sweep`; `expand()` turns it into one config per length.
    """

    algorithm: str
    q: int = 2
    n: int = 64
    k: int | None = None
    beta: int | None = None
    tau: int | None = None
    trials: int = 10
    seed: int = 0
    oracle: str = EXHAUSTIVE
    lb_weight: int = settings.LEE_BRICKELL_WEIGHT
    lb_budget: int | None = None
    skip_threshold: int = 0
    lll_after: bool = False
    cap: int | None = None
    workers: int = settings.BENCH_WORKERS
    verify: bool = True
    report: str | None = None
    csv: str | None = None
    sweep: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise UsageError(f"Unsupported algorithm: {self.algorithm}")
        if self.oracle not in (EXHAUSTIVE, LEE_BRICKELL):
            raise UsageError(f"Unsupported oracle: {self.oracle}")
        if self.trials < 1 or self.workers < 1:
            raise UsageError(f"Unsupported trials={self.trials} / workers={self.workers}")
        FieldSpec.from_order(self.q)
        if not 1 <= self.dimension <= self.n:
            raise UsageError(f"Unsupported code dimensions: k={self.dimension}, n={self.n}")
        if self.algorithm in NEEDS_BETA and self.beta is None:
            raise UsageError(f"Algorithm {self.algorithm} needs a block size beta")

    @property
    def dimension(self) -> int:
        return self.k if self.k is not None else self.n // 2

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> ExperimentConfig:
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise UsageError(f"Unsupported experiment keys: {sorted(unknown)}")
        values = dict(data)
        if isinstance(values.get("n"), list):
            sizes = tuple(int(n) for n in values["n"])
            if not sizes:
                raise UsageError("Empty list of lengths")
            values["n"], values["sweep"] = sizes[0], sizes
        elif "sweep" in values:
            values["sweep"] = tuple(values["sweep"])
        return cls(**values)

    @classmethod
    def from_toml(cls, path: str | Path) -> ExperimentConfig:
        with open(path, "rb") as f:
            data = tomllib.load(f)
        return cls.from_mapping(data)

    def with_overrides(self, **flags: Any) -> ExperimentConfig:
        """
        copy with every flag that is not None applied; a new `n` ends a sweep
        """
        changes = {name: value for name, value in flags.items() if value is not None}
        if "n" in changes:
            changes.setdefault("sweep", ())
        return dataclasses.replace(self, **changes)

    def expand(self) -> list[ExperimentConfig]:
        if not self.sweep:
            return [self]
        return [
            dataclasses.replace(
                self,
                n=n,
                sweep=(),
                report=_with_length_suffix(self.report, n),
                csv=_with_length_suffix(self.csv, n),
            )
            for n in self.sweep
        ]

    def shortest_oracle(self, seed: int) -> ShortestOracle:
        if self.oracle == LEE_BRICKELL:
            return ShortestOracle.lee_brickell(self.lb_weight, self.lb_budget, seed)
        return ShortestOracle.exhaustive()

    def resolved_tau(self) -> int:
        if self.tau is not None:
            return self.tau
        return min(default_tau(self.q, self.n), self.dimension)

    def to_json(self) -> dict[str, Any]:
        data = dataclasses.asdict(self)
        data["k"] = self.dimension
        data["sweep"] = list(self.sweep)
        return data


def _with_length_suffix(path: str | None, n: int) -> str | None:
    if path is None:
        return None
    target = Path(path)
    return str(target.with_name(f"{target.stem}-n{n}{target.suffix}"))


@dataclass
class ReductionOutcome:
    basis: CodeBasis
    counters: IterationCounters
    word: Word | None = None


def _merge(first: IterationCounters, second: IterationCounters) -> IterationCounters:
    return IterationCounters(
        cap=None,
        loop_iterations=first.loop_iterations + second.loop_iterations,
        forward_updates=first.forward_updates + second.forward_updates,
        backward_updates=first.backward_updates + second.backward_updates,
    )


def run_reduction(basis: CodeBasis, config: ExperimentConfig, seed: int) -> ReductionOutcome:
    """
    Single dispatch from an algorithm name to its reduction, shared by the `reduce` and
    `bench` commands.
    """
    oracle = config.shortest_oracle(seed)
    algorithm = config.algorithm
    beta = config.beta or 0
    if algorithm == "lll":
        reduced, counters = lll_reduce(basis, oracle, config.cap)
        return ReductionOutcome(reduced, counters)
    if algorithm == "bkz":
        reduced, counters = bkz_reduce(basis, beta, oracle, config.cap)
        return ReductionOutcome(reduced, counters)
    if algorithm == "slide":
        reduced, counters = slide_reduce(basis, beta, oracle, config.cap)
        if config.lll_after:
            reduced, lll_counters = lll_reduce(reduced, oracle)
            counters = _merge(counters, lll_counters)
        return ReductionOutcome(reduced, counters)
    if algorithm == "fullbackward":
        tau = config.resolved_tau()
        counters = IterationCounters(loop_iterations=tau)
        return ReductionOutcome(full_backward_reduce(basis, tau), counters)
    if algorithm == "selective":
        reduced = selective_backward_reduce(basis, beta)
        steps = max((basis.n - basis.k) // beta - 1, 0)
        counters = IterationCounters(loop_iterations=steps, backward_updates=steps)
        return ReductionOutcome(reduced, counters)
    if algorithm == "oneblock":
        word = one_block_reduce(basis, beta, oracle)
        # a shortest word of the shortened subcode is primitive in the whole code
        primitive = word if oracle.is_exact else make_primitive(basis, word)
        reduced = basis.copy()
        reduced.apply_block_transform(0, basis.k, insert_primitive(basis, primitive))
        counters = IterationCounters(loop_iterations=1, forward_updates=1)
        return ReductionOutcome(reduced, counters, word)
    reduced, counters = approx_griesmer_reduce(basis, oracle, config.skip_threshold)
    return ReductionOutcome(reduced, counters)


def verify_trial(
    original: CodeBasis, outcome: ReductionOutcome, config: ExperimentConfig
) -> dict[str, bool]:
    """
    Re-check the guarantees of the algorithm on its output with independent code paths.
    """
    reduced = outcome.basis
    q, n, k = original.field.q, original.n, original.k
    profile = reduced.profile()
    checks = {
        "proper": reduced.is_proper(),
        "same_code": original.same_code(reduced),
        "support_preserved": sum(profile) == original.support_size(),
    }
    exact = ShortestOracle.exhaustive()
    within_cutoff = (config.beta or 0) <= exact.cutoff_for(q)
    algorithm, beta = config.algorithm, config.beta or 0

    if algorithm == "lll" or (algorithm == "slide" and config.lll_after):
        checks["lll_decay"] = lll_decay_check(profile, q)
        checks["griesmer"] = lll_griesmer_check(profile, q, n)
    if algorithm == "bkz" and within_cutoff:
        checks["bkz_reduced"] = is_bkz_reduced(reduced, beta, exact)
        if (k - 1) % (beta - 1) == 0:
            checks["output_bound"] = profile[0] <= bkz_output_bound(q, n, k, beta)
    if algorithm == "slide" and not config.lll_after:
        if within_cutoff:
            checks["slide_reduced"] = is_slide_reduced(reduced, beta, exact)
        checks["twin_reduction"] = twin_reduction_check(profile, q, beta)
        checks["output_bound"] = profile[0] <= slide_output_bound(q, n, k, beta)
    if algorithm == "fullbackward":
        tau = config.resolved_tau()
        checks["fully_backward_reduced"] = is_fully_backward_reduced(reduced, tau)
        checks["full_backward_bound"] = full_backward_check(profile, q, n, k, tau)
    if algorithm == "oneblock" and outcome.word is not None and q**beta >= n:
        checks["one_block_bound"] = one_block_check(outcome.word.weight, q, n, k)
    if algorithm == "approxgriesmer" and config.oracle == EXHAUSTIVE and config.skip_threshold == 0:
        if k <= exact.cutoff_for(q):
            checks["griesmer_reduced"] = is_griesmer_reduced(reduced, exact)
    failed = [name for name, passed in checks.items() if not passed]
    if failed:
        logger.warning("%s output failed re-checks %s", algorithm, failed)
    return checks


@dataclass
class TrialResult:
    trial: int
    seed: int
    profile: list[int] = dataclass_field(default_factory=list)
    sorted_profile: list[int] = dataclass_field(default_factory=list)
    l1: int = 0
    k1: int = 0
    k1_star: int = 0
    support_size: int = 0
    counters: dict[str, Any] = dataclass_field(default_factory=dict)
    seconds: float = 0.0
    checks: dict[str, bool] = dataclass_field(default_factory=dict)
    word_weight: int | None = None
    attempts: int = 1
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def _sample_for_trial(config: ExperimentConfig, seed: int, attempt: int) -> CodeBasis:
    entropy: int | list[int] = seed if attempt == 0 else [seed, attempt]
    # selective reduction picks its own information set from the raw matrix
    systematic = config.algorithm != "selective"
    return sample_random_code(config.q, config.dimension, config.n, entropy, systematic)


def run_trial(config: ExperimentConfig, trial: int) -> TrialResult:
    seed = config.seed + trial
    result = TrialResult(trial=trial, seed=seed)
    attempts = settings.SELECTIVE_MAX_ATTEMPTS if config.algorithm == "selective" else 1
    for attempt in range(attempts):
        basis = _sample_for_trial(config, seed, attempt)
        result.attempts = attempt + 1
        start = time.perf_counter()
        try:
            outcome = run_reduction(basis, config, seed)
        except SelectionFailure as e:
            logger.warning("trial %d: %s, drawing a fresh code", trial, e)
            result.error = f"{type(e).__name__}: {e}"
            continue
        except CodeReductionError as e:
            logger.warning("trial %d failed: %s", trial, e)
            result.error = f"{type(e).__name__}: {e}"
            return result
        result.seconds = time.perf_counter() - start
        result.error = None
        break
    else:
        return result

    reduced = outcome.basis
    result.profile = reduced.profile()
    result.sorted_profile = sorted(result.profile, reverse=True)
    result.l1 = result.profile[0]
    result.k1 = k1(result.profile)
    result.k1_star = k1_star(result.profile)
    result.support_size = reduced.support_size()
    result.counters = outcome.counters.as_dict()
    result.word_weight = outcome.word.weight if outcome.word is not None else None
    if config.verify:
        result.checks = verify_trial(basis, outcome, config)
    return result


def _mean_two_sigma(values: Sequence[float]) -> tuple[float, float]:
    if not values:
        return 0.0, 0.0
    array = np.asarray(values, dtype=float)
    spread = float(np.std(array, ddof=1)) if array.size > 1 else 0.0
    return float(array.mean()), 2 * spread


@dataclass
class ReductionReport:
    """
    Trials in trial order plus aggregates over the successful ones. Profiles are
    averaged index-wise after sorting each in decreasing order, so entry i is the mean
    of the (i+1)-th longest epipodal length.
    """

    config: ExperimentConfig
    trials: list[TrialResult]

    @property
    def successes(self) -> list[TrialResult]:
        return [t for t in self.trials if t.ok]

    @property
    def failures(self) -> int:
        return len(self.trials) - len(self.successes)

    def sorted_profile_stats(self) -> list[tuple[float, float]]:
        profiles = [t.sorted_profile for t in self.successes]
        if not profiles:
            return []
        matrix = np.asarray(profiles, dtype=float)
        means = matrix.mean(axis=0)
        spread = matrix.std(axis=0, ddof=1) if len(profiles) > 1 else np.zeros_like(means)
        return [(float(m), 2 * float(s)) for m, s in zip(means, spread)]

    def aggregates(self) -> dict[str, Any]:
        successes = self.successes
        summary: dict[str, Any] = {"trials": len(self.trials), "failures": self.failures}
        for name in ("l1", "k1", "k1_star", "seconds"):
            mean, two_sigma = _mean_two_sigma([getattr(t, name) for t in successes])
            summary[name] = {"mean": mean, "two_sigma": two_sigma}
        stats = self.sorted_profile_stats()
        top_mean, top_sigma = stats[0] if stats else (0.0, 0.0)
        summary["sorted_l1"] = {"mean": top_mean, "two_sigma": top_sigma}
        summary["all_checks_passed"] = all(all(t.checks.values()) for t in successes)
        return summary

    def to_json(self) -> dict[str, Any]:
        return {
            "config": self.config.to_json(),
            "aggregates": self.aggregates(),
            "sorted_profile": [
                {"index": i + 1, "mean": mean, "two_sigma": sigma}
                for i, (mean, sigma) in enumerate(self.sorted_profile_stats())
            ],
            "trials": [dataclasses.asdict(t) for t in self.trials],
        }

    def write_json(self, path: str | Path) -> None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n")
        logger.info("wrote report to %s", path)

    def write_csv(self, path: str | Path) -> None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["index", "mean", "two_sigma"])
            for i, (mean, sigma) in enumerate(self.sorted_profile_stats()):
                writer.writerow([i + 1, f"{mean:.6f}", f"{sigma:.6f}"])
        logger.info("wrote sorted profile to %s", path)


class ExperimentRunner:
    """
    Runs every trial of one experiment and folds them into a report in trial order,
    whatever order the workers finish in.

    Usage:

    report = ExperimentRunner(config).execute()
    print(report.aggregates()["k1"]["mean"])
    """

    def __init__(self, config: ExperimentConfig) -> None:
        if config.sweep:
            raise UsageError("Expand a sweep into single-length configs before running it")
        self.config = config

    def _run_trials(self) -> list[TrialResult]:
        config = self.config
        indices = range(config.trials)
        if config.workers == 1:
            return [run_trial(config, t) for t in indices]
        with ProcessPoolExecutor(max_workers=config.workers) as executor:
            return list(executor.map(run_trial, [config] * config.trials, indices))

    def execute(self) -> ReductionReport:
        config = self.config
        logger.info(
            "experiment start: %s q=%d n=%d k=%d trials=%d",
            config.algorithm,
            config.q,
            config.n,
            config.dimension,
            config.trials,
        )
        report = ReductionReport(config=config, trials=self._run_trials())
        if config.report:
            report.write_json(config.report)
        if config.csv:
            report.write_csv(config.csv)
        logger.info("experiment done: %s failures out of %d", report.failures, config.trials)
        return report
