"""
Command-line interface: model generation, algorithm runs, oracle
comparison and benchmarks.
"""

from .generators import KINDS, generate_model, parse_potential, with_potential
from .handlers import ALGORITHMS, RunOptions, run_algorithm
from .main import build_parser, main
from .results import BenchRow, ComparisonRow, RunResult, compare_result

__all__ = [
    "ALGORITHMS",
    "KINDS",
    "BenchRow",
    "ComparisonRow",
    "RunOptions",
    "RunResult",
    "build_parser",
    "compare_result",
    "generate_model",
    "main",
    "parse_potential",
    "run_algorithm",
    "with_potential",
]
