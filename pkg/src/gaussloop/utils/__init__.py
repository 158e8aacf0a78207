"""
Common utilities for gaussloop.

This module contains configuration, logging and bookkeeping helpers
used throughout the package.
"""

from .config import Settings, load_settings
from .log import setup_logging
from .resource_monitor import ResourceMonitor
from .run_tracker import RunTracker
from .time_formatter import format_duration, format_duration_short

__all__ = [
    "Settings",
    "load_settings",
    "setup_logging",
    "ResourceMonitor",
    "RunTracker",
    "format_duration",
    "format_duration_short",
]
