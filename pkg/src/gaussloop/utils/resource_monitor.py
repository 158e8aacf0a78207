"""
Resource monitoring for benchmarks.

Reports the memory footprint of the current process and of the machine,
so benchmark rows can carry a memory column next to wall times.
"""

import gc
import logging
import os

import psutil

logger = logging.getLogger(__name__)


class ResourceMonitor:
    """
    Process and system memory statistics.
    """

    @staticmethod
    def cleanup():
        """Force a garbage collection between benchmark repetitions."""
        gc.collect()

    @staticmethod
    def get_memory_stats() -> dict:
        """
        Collect the current memory statistics.

        Returns:
            dict: Process RSS and system memory usage
        """
        process = psutil.Process(os.getpid())
        virtual = psutil.virtual_memory()
        return {
            "rss_mb": process.memory_info().rss / (1024 ** 2),
            "memory_percent": virtual.percent,
            "memory_available_gb": virtual.available / (1024 ** 3),
        }

    @staticmethod
    def log_memory_stats(label: str = ""):
        """
        Log the memory statistics with an optional label.

        Args:
            label (str): Descriptive label for the stats
        """
        stats = ResourceMonitor.get_memory_stats()
        prefix = f"[{label}] " if label else ""
        logger.info(f"{prefix}💾 RSS: {stats['rss_mb']:.1f} MB, system memory: "
                    f"{stats['memory_percent']:.1f}% (available: {stats['memory_available_gb']:.1f} GB)")
