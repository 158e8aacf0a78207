"""
Command handlers for the gaussloop CLI.

Each handler receives the parsed arguments and the settings, writes its
results to stdout (or to --output) and returns the process exit code.
Package errors propagate to the entry point, which renders them as JSON
diagnostics on stderr.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
import json
import logging
from pathlib import Path
import sys
import time
from typing import List, Optional

import numpy as np

from ..cavity import covariance_by_cavity_runs, full_covariance_growing, resolve_cavity_covariance
from ..core import RunReport, Schedule, run_gabp, run_lcbp
from ..ep import full_gaussian_ep, run_lc_ep
from ..errors import GaussLoopError, ModelError, UsageError
from ..model import PerturbedModel, dumps_model, load_model
from ..oracle import exact_gaussian, exact_perturbed
from ..utils import ResourceMonitor, RunTracker, Settings, format_duration, format_duration_short
from .generators import generate_model, parse_potential, with_potential
from .labels import CliLabels
from .results import BenchRow, ComparisonRow, RunResult, compare_result, covariance_csv, rows_csv, rows_json

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_NOT_CONVERGED = 2
EXIT_OVER_TOLERANCE = 3

ALGORITHMS = (
    "gabp",
    "lcbp",
    "lc_variance",
    "covariance_grow",
    "covariance_cavity",
    "ep_full",
    "ep_lc",
    "ep_alt",
)
GAUSSIAN_ONLY = ("gabp", "lcbp", "lc_variance", "covariance_grow", "covariance_cavity")


@dataclass(frozen=True)
class RunOptions:
    """Options shared by run, compare and bench."""

    schedule: Schedule
    jobs: int = 1
    estimate_A: Optional[str] = None
    order: str = "id"
    fast_ep: bool = False


def _tracker_report(algorithm: str, tracker: RunTracker, wall_time: float) -> dict:
    stats = tracker.as_dict()
    return {
        "algorithm": algorithm,
        "iterations": stats["iterations"],
        "residual": stats["max_residual"],
        "converged": stats["converged"],
        "skipped": stats["skipped"],
        "wall_time": wall_time,
        "bp_runs": stats["runs"],
        "retries": stats["retries"],
    }


def _report(report: RunReport, algorithm: str) -> dict:
    data = report.as_dict()
    data["algorithm"] = algorithm
    return data


def run_algorithm(model: PerturbedModel, algorithm: str, options: RunOptions) -> RunResult:
    """
    Dispatch one algorithm on a model.

    Args:
        model (PerturbedModel): Model read from a model file
        algorithm (str): One of ALGORITHMS
        options (RunOptions): Schedule and algorithm options

    Returns:
        RunResult: Marginals, optional covariance and report
    """
    if algorithm not in ALGORITHMS:
        raise UsageError(f"unknown algorithm {algorithm!r}; expected one of {', '.join(ALGORITHMS)}")
    if algorithm in GAUSSIAN_ONLY and not model.is_gaussian:
        raise UsageError(f"{algorithm} needs a Gaussian model; use ep_full, ep_lc or ep_alt "
                         "for models with potentials")
    base, schedule = model.base, options.schedule
    logger.info(f"🚀 Running {algorithm} on {base.n} nodes, {len(base.edges)} edges")

    if algorithm == "gabp":
        run = run_gabp(base, schedule)
        return RunResult(algorithm, base.ids, run.marginals.means, run.marginals.variances,
                         report=_report(run.report, algorithm))

    if algorithm == "lcbp":
        if not options.estimate_A:
            raise UsageError("lcbp needs a cavity covariance source (--estimate-A)")
        A = resolve_cavity_covariance(base, options.estimate_A, schedule, options.jobs)
        run = run_lcbp(base, A, schedule)
        report = _report(run.report, algorithm)
        report["estimate_A"] = options.estimate_A
        return RunResult(algorithm, base.ids, run.marginals.means, run.marginals.variances,
                         report=report)

    if algorithm in ("lc_variance", "covariance_cavity"):
        start = time.perf_counter()
        cavity = covariance_by_cavity_runs(base, schedule, options.jobs)
        report = _tracker_report(algorithm, cavity.tracker, time.perf_counter() - start)
        covariance = cavity.as_matrix() if algorithm == "covariance_cavity" else None
        return RunResult(algorithm, base.ids, cavity.means, cavity.variances, covariance, report)

    if algorithm == "covariance_grow":
        start = time.perf_counter()
        grown = full_covariance_growing(base, options.order, schedule)
        report = _tracker_report(algorithm, grown.tracker, time.perf_counter() - start)
        report["order"] = list(grown.order)
        report["shift"] = grown.shift
        return RunResult(algorithm, grown.ids, grown.means, np.diag(grown.covariance).copy(),
                         grown.covariance, report)

    if algorithm == "ep_full":
        ep = full_gaussian_ep(model, schedule, fast=options.fast_ep)
        marginals = ep.marginals
        report = _report(ep.report, algorithm)
        report["sites"] = ep.sites.records()
        return RunResult(algorithm, ep.ids, marginals.means, marginals.variances, ep.covariance, report)

    variant = "lc" if algorithm == "ep_lc" else "alt"
    lc = run_lc_ep(model, options.estimate_A, schedule, variant=variant, jobs=options.jobs)
    report = _report(lc.report, algorithm)
    report["estimate_A"] = options.estimate_A
    return RunResult(algorithm, base.ids, lc.marginals.means, lc.marginals.variances, report=report)


# --- helpers ----------------------------------------------------------------

def _jobs(args, settings: Settings) -> int:
    jobs = args.jobs if getattr(args, "jobs", None) is not None else settings.jobs
    if jobs < 1:
        raise UsageError(f"--jobs must be >= 1, got {jobs}")
    return jobs


def build_schedule(args, settings: Settings, tol: Optional[float]) -> Schedule:
    """Schedule from settings, overridden by command-line flags."""
    return Schedule.from_settings(
        settings,
        tol=tol,
        max_iters=args.max_iters,
        damping=args.damping,
        seed=args.seed,
        order=args.update_order,
        strict=args.strict or None,
    )


def build_options(args, settings: Settings, tol: Optional[float]) -> RunOptions:
    return RunOptions(
        schedule=build_schedule(args, settings, tol),
        jobs=_jobs(args, settings),
        estimate_A=args.estimate_A,
        order=args.order,
        fast_ep=args.fast_ep,
    )


def _emit(text: str, output: Optional[str]):
    if output:
        try:
            Path(output).write_text(text, encoding="utf-8")
        except OSError as e:
            raise UsageError(f"cannot write {output}: {e}") from e
        logger.info(f"💾 Written to {output}")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _read_result(path: str) -> RunResult:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ModelError(f"cannot read result file {path}: {e}") from e
    return RunResult.loads(text)


def oracle_for(model: PerturbedModel):
    """Dense solution for Gaussian models, grid quadrature otherwise."""
    if model.is_gaussian:
        return exact_gaussian(model.base)
    return exact_perturbed(model)


# --- commands ---------------------------------------------------------------

def cmd_generate(args, settings: Settings) -> int:
    seed = args.seed if args.seed is not None else settings.seed
    model = generate_model(args.kind, args.n, args.coupling, seed)
    _emit(dumps_model(with_potential(model, parse_potential(args.potential))), args.output)
    return EXIT_OK


def cmd_validate(args, settings: Settings) -> int:
    model = load_model(args.model)
    data = model.base.validate().as_dict()
    data["is_tree"] = model.base.is_tree()
    data["n_potentials"] = sum(1 for p in model.potentials.values() if not p.is_none)
    _emit(json.dumps(data, indent=2) + "\n", args.output)
    return EXIT_OK


def cmd_run(args, settings: Settings) -> int:
    model = load_model(args.model)
    result = run_algorithm(model, args.algorithm, build_options(args, settings, args.tol))
    _emit(result.dumps(), args.output)
    if args.covariance_csv:
        if result.covariance is None:
            logger.warning(f"⚠️ {args.algorithm} computes no covariance matrix, nothing written")
        else:
            _emit(covariance_csv(result.ids, result.covariance), args.covariance_csv)

    if result.converged:
        logger.info(f"{CliLabels.CONVERGED}: {args.algorithm} "
                    f"({format_duration(result.report.get('wall_time') or 0.0)})")
        return EXIT_OK
    logger.warning(f"{CliLabels.NOT_CONVERGED}: {args.algorithm}")
    return EXIT_NOT_CONVERGED


def cmd_compare(args, settings: Settings) -> int:
    algorithms = list(args.algorithms or [])
    result_files = list(args.result or [])
    if not algorithms and not result_files:
        raise UsageError("nothing to compare: give --algorithms or --result")

    model = load_model(args.model)
    oracle = oracle_for(model)
    results: List[RunResult] = [_read_result(path) for path in result_files]
    if algorithms:
        options = build_options(args, settings, tol=args.iter_tol)
        results.extend(run_algorithm(model, name, options) for name in algorithms)

    rows: List[ComparisonRow] = []
    for result in results:
        rows.extend(compare_result(result, oracle, args.tol))
    text = rows_csv(rows, ComparisonRow) if args.format == "csv" else rows_json(rows)
    _emit(text, args.output)

    failed = [r for r in rows if r.verdict == CliLabels.COMPARE_FAIL]
    for row in failed:
        logger.warning(f"❌ {row.algorithm} {row.quantity}: max abs error {row.max_abs:.3e} > {args.tol:g}")
    if failed:
        return EXIT_OVER_TOLERANCE
    if not all(r.converged for r in results):
        return EXIT_NOT_CONVERGED
    return EXIT_OK


@dataclass(frozen=True)
class BenchTask:
    """One benchmark row: an algorithm timed on one generated model."""

    family: str
    n: int
    algorithm: str
    model: PerturbedModel
    oracle: object
    options: RunOptions
    repetitions: int


def _bench_one(task: BenchTask) -> BenchRow:
    times, result = [], None
    try:
        for _ in range(task.repetitions):
            ResourceMonitor.cleanup()
            start = time.perf_counter()
            result = run_algorithm(task.model, task.algorithm, task.options)
            times.append((time.perf_counter() - start) * 1000.0)
    except UsageError:
        raise
    except GaussLoopError as e:
        logger.error(f"❌ {task.algorithm} failed on {task.family} n={task.n}: {e}")
        times, result = [], None

    max_err = None
    if result is not None and task.oracle is not None:
        rows = compare_result(result, task.oracle, float("inf"))
        max_err = max(r.max_abs for r in rows)
    mean_ms = float(np.mean(times)) if times else float("nan")
    std_ms = float(np.std(times)) if times else float("nan")
    if times:
        logger.info(f"✅ {task.algorithm} on {task.family} n={task.n}: "
                    f"{format_duration_short(mean_ms / 1000.0)} per run")
    return BenchRow(
        family=task.family,
        n=task.n,
        algorithm=task.algorithm,
        repetitions=task.repetitions,
        wall_ms_mean=mean_ms,
        wall_ms_std=std_ms,
        max_err=max_err,
        rss_mb=ResourceMonitor.get_memory_stats()["rss_mb"],
    )


def _run_bench_tasks(tasks: List[BenchTask], jobs: int) -> List[BenchRow]:
    """Rows in task order, whatever the number of workers."""
    if jobs <= 1 or len(tasks) <= 1:
        return [_bench_one(task) for task in tasks]
    logger.info(f"🔄 Dispatching {len(tasks)} benchmark rows on {jobs} workers")
    # les workers n'ouvrent pas de second pool
    tasks = [replace(task, options=replace(task.options, jobs=1)) for task in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_bench_one, tasks))


def cmd_bench(args, settings: Settings) -> int:
    if args.repetitions < 1:
        raise UsageError(f"--repetitions must be >= 1, got {args.repetitions}")
    if not args.algorithms:
        raise UsageError("no algorithm to benchmark")
    seed = args.seed if args.seed is not None else settings.seed
    options = build_options(args, settings, args.tol)
    potential = parse_potential(args.potential)

    tasks: List[BenchTask] = []
    for n in args.sizes:
        model = with_potential(generate_model(args.family, n, args.coupling, seed), potential)
        try:
            oracle = oracle_for(model)
        except GaussLoopError as e:
            logger.warning(f"⚠️ No oracle for {args.family} n={n}: {e}")
            oracle = None
        for algorithm in args.algorithms:
            logger.info(f"⏱️ {algorithm} on {args.family} n={n} ({args.repetitions} repetitions)")
            tasks.append(BenchTask(args.family, n, algorithm, model, oracle, options, args.repetitions))

    rows = _run_bench_tasks(tasks, options.jobs)
    ResourceMonitor.log_memory_stats("bench")
    _emit(rows_csv(rows, BenchRow), args.output)
    return EXIT_OK
