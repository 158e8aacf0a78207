"""
Configuration loading for gaussloop.

Settings are read from environment variables, optionally provided by a
``.env`` file at the working directory (loaded with python-dotenv).

Environment variables:
    GAUSSLOOP_TOL: Residual tolerance of message iterations (default: 1e-10)
    GAUSSLOOP_MAX_ITERS: Maximum number of sweeps (default: 10000)
    GAUSSLOOP_DAMPING: Damping factor in [0, 1) (default: 0.0)
    GAUSSLOOP_JOBS: Worker processes for independent cavity runs (default: 1)
    GAUSSLOOP_SEED: Seed used by generators and random schedules (default: 0)
    GAUSSLOOP_LOG_LEVEL: Logging level name (default: WARNING)
"""

import os
from dataclasses import dataclass
from typing import Callable, Optional

from dotenv import load_dotenv

from ..errors import ConfigError

# Charger les variables d'environnement depuis le fichier .env
load_dotenv()

_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass(frozen=True)
class Settings:
    """Run-time defaults; CLI flags override them."""

    tol: float = 1e-10
    max_iters: int = 10000
    damping: float = 0.0
    jobs: int = 1
    seed: int = 0
    log_level: str = "WARNING"


def _read(name: str, cast: Callable, default, check: Optional[Callable] = None):
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = cast(raw.strip())
    except ValueError as e:
        raise ConfigError(f"{name}={raw!r} is not a valid value: {e}") from e
    if check is not None and not check(value):
        raise ConfigError(f"{name}={raw!r} is out of range")
    return value


def load_settings() -> Settings:
    """
    Build the settings from the environment.

    Returns:
        Settings: Validated settings

    Raises:
        ConfigError: If a variable cannot be parsed or is out of range
    """
    defaults = Settings()
    return Settings(
        tol=_read("GAUSSLOOP_TOL", float, defaults.tol, lambda x: x > 0),
        max_iters=_read("GAUSSLOOP_MAX_ITERS", int, defaults.max_iters, lambda x: x >= 0),
        damping=_read("GAUSSLOOP_DAMPING", float, defaults.damping, lambda x: 0.0 <= x < 1.0),
        jobs=_read("GAUSSLOOP_JOBS", int, defaults.jobs, lambda x: x >= 1),
        seed=_read("GAUSSLOOP_SEED", int, defaults.seed),
        log_level=_read("GAUSSLOOP_LOG_LEVEL", str.upper, defaults.log_level,
                        lambda x: x in _LOG_LEVELS),
    )
