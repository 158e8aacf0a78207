"""
Run tracking utility.

Counts message-passing runs, sweeps and skipped updates across a
computation made of many BP runs (cavity runs, growing graphs).
"""

import logging

logger = logging.getLogger(__name__)


class RunTracker:
    """
    Centralized bookkeeping of BP runs.

    Tracks the number of runs, total sweeps and skipped updates to provide
    a summary of the work done by a multi-run algorithm.
    """

    def __init__(self, label: str = "Unknown"):
        self.label = label
        self.reset()

    def reset(self):
        """Reset all counters."""
        self.runs = 0
        self.retries = 0
        self.total_iterations = 0
        self.total_skipped = 0
        self.total_wall_time = 0.0
        self.max_residual = 0.0
        self.all_converged = True

    def add_run(self, report, retry: bool = False):
        """Add the report of one BP run."""
        self.runs += 1
        if retry:
            self.retries += 1
        self.total_iterations += report.iterations
        self.total_skipped += report.skipped
        self.total_wall_time += report.wall_time
        self.max_residual = max(self.max_residual, report.residual)
        self.all_converged = self.all_converged and report.converged

        logger.debug(f"📊 {self.label} run {self.runs} - sweeps: {report.iterations}, "
                     f"residual: {report.residual:.3e}, skipped: {report.skipped}")

    def as_dict(self) -> dict:
        return {
            "runs": self.runs,
            "retries": self.retries,
            "iterations": self.total_iterations,
            "skipped": self.total_skipped,
            "wall_time": self.total_wall_time,
            "max_residual": self.max_residual,
            "converged": self.all_converged,
        }

    def log_summary(self):
        """Log the final usage summary."""
        logger.info(f"📊 === RUN SUMMARY ({self.label}) ===")
        logger.info(f"📦 BP runs: {self.runs} (retries: {self.retries})")
        logger.info(f"🔁 Total sweeps: {self.total_iterations:,}")
        if self.total_skipped > 0:
            logger.info(f"⚠️ Skipped updates: {self.total_skipped:,}")
        logger.info(f"📈 Max final residual: {self.max_residual:.3e}")
