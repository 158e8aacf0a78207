"""
Command-line entry point for gaussloop.

Subcommands: generate, run, compare, bench, validate. Results are written
to stdout, diagnostics and logs to stderr.
"""

import argparse
import json
import logging
import sys
from typing import List, Optional

from .. import __version__
from ..cavity import A_SOURCES
from ..core import Order
from ..errors import GaussLoopError, NonConvergence, UsageError
from ..utils import load_settings, setup_logging
from .generators import KINDS
from .handlers import (
    ALGORITHMS,
    EXIT_INPUT_ERROR,
    EXIT_NOT_CONVERGED,
    cmd_bench,
    cmd_compare,
    cmd_generate,
    cmd_run,
    cmd_validate,
)
from .labels import CliLabels

logger = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports bad arguments as UsageError (exit code 1)."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--log-level", default=None,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
                        type=str.upper, help=CliLabels.LOG_LEVEL_HELP)
    common.add_argument("--output", "-o", default=None, help=CliLabels.OUTPUT_HELP)
    return common


def _schedule_flags(tol_flag: str = "--tol") -> argparse.ArgumentParser:
    flags = argparse.ArgumentParser(add_help=False)
    flags.add_argument(tol_flag, type=float, default=None, dest=tol_flag.lstrip("-").replace("-", "_"),
                       help=CliLabels.TOL_HELP if tol_flag == "--tol" else CliLabels.ITER_TOL_HELP)
    flags.add_argument("--max-iters", type=int, default=None, help=CliLabels.MAX_ITERS_HELP)
    flags.add_argument("--damping", type=float, default=None, help=CliLabels.DAMPING_HELP)
    flags.add_argument("--seed", type=int, default=None, help=CliLabels.SEED_HELP)
    flags.add_argument("--jobs", type=int, default=None, help=CliLabels.JOBS_HELP)
    flags.add_argument("--estimate-A", dest="estimate_A", default=None, metavar="SOURCE",
                       help=f"{CliLabels.ESTIMATE_A_HELP} ({', '.join(A_SOURCES)})")
    flags.add_argument("--order", choices=["id", "degree"], default="id", help=CliLabels.ORDER_HELP)
    flags.add_argument("--update-order", choices=[o.value for o in Order], default=None,
                       help=CliLabels.UPDATE_ORDER_HELP)
    flags.add_argument("--strict", action="store_true", help=CliLabels.STRICT_HELP)
    flags.add_argument("--fast-ep", action="store_true", help=CliLabels.FAST_EP_HELP)
    return flags


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=CliLabels.PROG, description=CliLabels.DESCRIPTION)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_flags()

    generate = sub.add_parser("generate", parents=[common], help=CliLabels.GENERATE_HELP)
    generate.add_argument("kind", choices=KINDS, help=CliLabels.KIND_HELP)
    generate.add_argument("n", type=int, help=CliLabels.SIZE_HELP)
    generate.add_argument("--coupling", type=float, default=0.3, help=CliLabels.COUPLING_HELP)
    generate.add_argument("--seed", type=int, default=None, help=CliLabels.SEED_HELP)
    generate.add_argument("--potential", default=None, help=CliLabels.POTENTIAL_HELP)
    generate.set_defaults(handler=cmd_generate)

    run = sub.add_parser("run", parents=[common, _schedule_flags()], help=CliLabels.RUN_HELP)
    run.add_argument("model", help=CliLabels.MODEL_HELP)
    run.add_argument("--algorithm", "-a", required=True, choices=ALGORITHMS, help=CliLabels.ALGORITHM_HELP)
    run.add_argument("--covariance-csv", default=None, help=CliLabels.COVARIANCE_CSV_HELP)
    run.set_defaults(handler=cmd_run)

    compare = sub.add_parser("compare", parents=[common, _schedule_flags("--iter-tol")],
                             help=CliLabels.COMPARE_HELP)
    compare.add_argument("model", help=CliLabels.MODEL_HELP)
    compare.add_argument("--algorithms", nargs="*", choices=ALGORITHMS, default=[],
                         help=CliLabels.ALGORITHMS_HELP)
    compare.add_argument("--result", nargs="*", default=[], help=CliLabels.RESULT_HELP)
    compare.add_argument("--tol", type=float, default=1e-8, help=CliLabels.THRESHOLD_HELP)
    compare.add_argument("--format", choices=["csv", "json"], default="csv", help=CliLabels.FORMAT_HELP)
    compare.set_defaults(handler=cmd_compare)

    bench = sub.add_parser("bench", parents=[common, _schedule_flags()], help=CliLabels.BENCH_HELP)
    bench.add_argument("--family", choices=KINDS, default="chain", help=CliLabels.FAMILY_HELP)
    bench.add_argument("--sizes", type=int, nargs="+", default=[10, 50, 100], help=CliLabels.SIZES_HELP)
    bench.add_argument("--algorithms", nargs="*", choices=ALGORITHMS, default=["gabp"],
                       help=CliLabels.ALGORITHMS_HELP)
    bench.add_argument("--repetitions", type=int, default=3, help=CliLabels.REPETITIONS_HELP)
    bench.add_argument("--coupling", type=float, default=0.3, help=CliLabels.COUPLING_HELP)
    bench.add_argument("--potential", default=None, help=CliLabels.POTENTIAL_HELP)
    bench.set_defaults(handler=cmd_bench)

    validate = sub.add_parser("validate", parents=[common], help=CliLabels.VALIDATE_HELP)
    validate.add_argument("model", help=CliLabels.MODEL_HELP)
    validate.set_defaults(handler=cmd_validate)
    return parser


def _diagnostic(error: Exception) -> str:
    return json.dumps({"error": type(error).__name__, "message": str(error)})


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse the arguments and run the selected command.

    Returns:
        int: 0 on success, 1 on input errors, 2 on non-convergence,
        3 when compare finds an error above --tol
    """
    try:
        settings = load_settings()
        args = build_parser().parse_args(argv)
        setup_logging(args.log_level or settings.log_level)
        return args.handler(args, settings)
    except NonConvergence as e:
        print(_diagnostic(e), file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except GaussLoopError as e:
        print(_diagnostic(e), file=sys.stderr)
        return EXIT_INPUT_ERROR
    except KeyboardInterrupt:
        logger.warning("⚠️ Interrupted")
        return EXIT_INPUT_ERROR
