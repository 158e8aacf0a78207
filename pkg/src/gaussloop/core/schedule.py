"""
Ordonnancement des itérations et rapport d'exécution.

Schedule regroupe les paramètres communs à toutes les itérations de point
fixe (GaBP, LCBP, propagation de réponse, EP). RunReport décrit le
résultat d'une exécution.
"""

from dataclasses import asdict, dataclass, field, replace
from enum import Enum
import logging
import time
from typing import Any, Callable, Dict, Tuple, TypeVar

import numpy as np

from ..errors import NonConvergence, UsageError
from ..utils.time_formatter import format_duration

logger = logging.getLogger(__name__)

State = TypeVar("State")

# fréquence des logs de progression (en balayages)
PROGRESS_EVERY = 1000


class Order(str, Enum):
    SEQUENTIAL_FIXED = "sequential_fixed"
    RANDOM_PERMUTATION = "random_permutation"


@dataclass(frozen=True)
class Schedule:
    """
    Paramètres d'itération.

    Attributes:
        max_iters: nombre maximal de balayages
        tol: seuil du résidu (changement absolu maximal)
        damping: facteur d'amortissement dans [0, 1)
        order: ordre de mise à jour des arêtes orientées
        seed: graine de l'ordre aléatoire
        strict: lève une exception au lieu d'ignorer une mise à jour invalide
    """

    max_iters: int = 10000
    tol: float = 1e-10
    damping: float = 0.0
    order: Order = Order.SEQUENTIAL_FIXED
    seed: int = 0
    strict: bool = False

    def __post_init__(self):
        object.__setattr__(self, "order", Order(self.order))
        if not self.tol > 0:
            raise UsageError(f"tol must be > 0, got {self.tol}")
        if not 0.0 <= self.damping < 1.0:
            raise UsageError(f"damping must be in [0, 1), got {self.damping}")
        if self.max_iters < 0:
            raise UsageError(f"max_iters must be >= 0, got {self.max_iters}")

    @classmethod
    def from_settings(cls, settings, **overrides) -> "Schedule":
        values = dict(max_iters=settings.max_iters, tol=settings.tol,
                      damping=settings.damping, seed=settings.seed)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def with_(self, **changes) -> "Schedule":
        return replace(self, **changes)

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def sweep_order(self, count: int, rng: np.random.Generator) -> np.ndarray:
        if self.order is Order.RANDOM_PERMUTATION:
            return rng.permutation(count)
        return np.arange(count)

    def mix(self, new, old):
        """Combinaison convexe amortie (identité exacte si damping = 0)."""
        if self.damping == 0.0:
            return new
        return (1.0 - self.damping) * new + self.damping * old


@dataclass
class RunReport:
    algorithm: str
    iterations: int = 0
    residual: float = float("inf")
    converged: bool = False
    skipped: int = 0
    wall_time: float = 0.0
    extra: Dict[str, Any] = field(default_factory=dict)

    def raise_for_convergence(self) -> "RunReport":
        if not self.converged:
            raise NonConvergence(
                f"{self.algorithm} did not converge after {self.iterations} sweeps "
                f"(residual {self.residual:.3e})",
                report=self,
            )
        return self

    def as_dict(self) -> dict:
        data = asdict(self)
        data.update(data.pop("extra"))
        return data


def iterate(step: Callable[[State, np.random.Generator], Tuple[State, float, int]],
            state: State, schedule: Schedule, algorithm: str) -> Tuple[State, RunReport]:
    """
    Boucle de point fixe commune.

    Args:
        step: fonction (state, rng) -> (state, résidu, mises à jour ignorées)
        state: état initial
        schedule (Schedule): paramètres d'itération
        algorithm (str): étiquette pour le rapport et les logs

    Returns:
        tuple: (état final, RunReport)
    """
    report = RunReport(algorithm=algorithm)
    rng = schedule.rng()
    start = time.perf_counter()
    for sweep in range(1, schedule.max_iters + 1):
        state, residual, skipped = step(state, rng)
        report.iterations = sweep
        report.residual = float(residual)
        report.skipped += skipped
        # un balayage avec des mises à jour ignorées n'est pas un point fixe
        if residual < schedule.tol and skipped == 0:
            report.converged = True
            break
        if sweep % PROGRESS_EVERY == 0:
            logger.debug(f"🔄 {algorithm}: sweep {sweep}, residual {residual:.3e}")
    report.wall_time = time.perf_counter() - start

    if report.skipped:
        logger.warning(f"⚠️ {algorithm}: {report.skipped} update(s) skipped")
    if report.converged:
        logger.info(f"✅ {algorithm} converged in {report.iterations} sweeps "
                    f"({format_duration(report.wall_time)})")
    else:
        logger.warning(f"❌ {algorithm} did not converge: residual {report.residual:.3e} "
                       f"after {report.iterations} sweeps")
    return state, report
