"""
CLI labels and help texts for gaussloop.

This module centralizes the text of the command-line interface so the
parser and the handlers share the same wording.
"""


class CliLabels:
    """Centralized CLI labels and help texts."""

    # Main parser
    PROG = "gaussloop"
    DESCRIPTION = ("Loop-corrected Gaussian message passing: GaBP, LCBP, cavity covariances, "
                   "growing-graph covariance and EP variants, checked against a dense oracle.")

    # Subcommands
    GENERATE_HELP = "🧪 Generate a model file (chain, cycle, grid, random_dominant, tree)"
    RUN_HELP = "🚀 Run one algorithm on a model file and print the result as JSON"
    COMPARE_HELP = "📊 Compare algorithm results with the exact oracle"
    BENCH_HELP = "⏱️ Time algorithms on a model family and print a CSV table"
    VALIDATE_HELP = "🔍 Print structural diagnostics of a model file"

    # Common flags
    TOL_HELP = "Residual tolerance of the iterations"
    MAX_ITERS_HELP = "Maximum number of sweeps"
    DAMPING_HELP = "Damping factor in [0, 1)"
    SEED_HELP = "Seed for generators and random update orders"
    JOBS_HELP = "Worker processes for independent cavity computations"
    ESTIMATE_A_HELP = "Cavity covariance source: response | exact-oracle | file:<path>"
    ORDER_HELP = "Node order of the growing-graph covariance: id | degree"
    UPDATE_ORDER_HELP = "Message update order: sequential_fixed | random_permutation"
    LOG_LEVEL_HELP = "Logging level (diagnostics go to stderr)"
    STRICT_HELP = "Raise instead of skipping invalid updates"

    # generate
    KIND_HELP = "Model family"
    SIZE_HELP = "Number of nodes (side length for grid)"
    COUPLING_HELP = "Coupling strength (uniform value, or half-width of the random range)"
    POTENTIAL_HELP = "Potential on every node: quartic:<lambda> or double_well:<a>,<b>"
    OUTPUT_HELP = "Output file (stdout if omitted)"

    # run / compare
    MODEL_HELP = "Model file (JSON)"
    ALGORITHM_HELP = "Algorithm to run"
    ALGORITHMS_HELP = "Algorithms to run and compare"
    RESULT_HELP = "Result file produced by 'run' to compare instead of running algorithms"
    THRESHOLD_HELP = "Comparison threshold on absolute errors"
    ITER_TOL_HELP = "Residual tolerance of the iterations run by compare"
    FORMAT_HELP = "Output format"
    FAST_EP_HELP = "Rank-one updates in full EP instead of one inversion per site"
    COVARIANCE_CSV_HELP = "Also write the covariance matrix as CSV to this path"

    # bench
    FAMILY_HELP = "Model family used for the benchmark"
    SIZES_HELP = "Model sizes"
    REPETITIONS_HELP = "Repetitions per (size, algorithm)"

    # Messages
    CONVERGED = "✅ Converged"
    NOT_CONVERGED = "❌ Did not converge"
    COMPARE_PASS = "pass"
    COMPARE_FAIL = "fail"
