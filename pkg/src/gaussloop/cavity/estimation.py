"""
Estimation des covariances cavité et routes « N exécutions cavité ».

Les calculs par noeud sont indépendants: avec jobs > 1 ils sont répartis
sur un ProcessPoolExecutor, l'ordre des résultats reste celui des ids.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import logging
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np

from ..core import CavityCovariance, Schedule, run_gabp
from ..errors import UsageError
from ..model import GaussianModel
from ..utils.run_tracker import RunTracker
from .response import response_propagation
from .variance import cavity_bp_pair, kappa_u

logger = logging.getLogger(__name__)

A_SOURCES = ("response", "exact-oracle", "file:<path>")


def _map_nodes(fn: Callable, model: GaussianModel, ids: Iterable[int], schedule: Schedule,
               jobs: int) -> List:
    ids = list(ids)
    if jobs <= 1 or len(ids) <= 1:
        return [fn(model, i, schedule) for i in ids]
    logger.info(f"🔄 Dispatching {len(ids)} cavity computations on {jobs} workers")
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, [model] * len(ids), ids, [schedule] * len(ids)))


def cavity_covariances_by_response(model: GaussianModel, schedule: Optional[Schedule] = None,
                                   jobs: int = 1) -> CavityCovariance:
    """
    Tous les A_i par propagation de réponse.

    Les noeuds de degré < 2 ont un bloc nul sans calcul.
    """
    schedule = schedule or Schedule()
    ids = [i for i in model.ids if model.degree(i) >= 2]
    blocks = dict(zip(ids, _map_nodes(response_propagation, model, ids, schedule, jobs)))
    logger.info(f"✅ Response propagation done for {len(ids)} cavity graphs")
    return CavityCovariance.from_blocks(model, blocks)


def resolve_cavity_covariance(model: GaussianModel, source: str, schedule: Optional[Schedule] = None,
                              jobs: int = 1) -> CavityCovariance:
    """
    Source de A: "response", "exact-oracle" ou "file:<chemin>".
    """
    if source == "response":
        return cavity_covariances_by_response(model, schedule, jobs)
    if source == "exact-oracle":
        from ..oracle import exact_cavity_covariances

        return exact_cavity_covariances(model)
    if source.startswith("file:") and len(source) > len("file:"):
        return CavityCovariance.load(source[len("file:"):], model)
    raise UsageError(f"unknown cavity covariance source {source!r}; expected one of {', '.join(A_SOURCES)}")


def _node_correction(model: GaussianModel, i: int, schedule: Schedule):
    pair = cavity_bp_pair(model, i, schedule)
    correction = kappa_u(pair.model, i, pair.full, pair.cavity)
    return correction, pair.shift, (pair.full.report, pair.cavity.report)


@dataclass
class CavityRunCovariance:
    """
    Covariance restreinte à la diagonale et aux arêtes, par N exécutions cavité.

    Attributes:
        ids: ids triés
        means: moyennes exactes (champ d'origine)
        variances: v_i^LC par noeud
        edge_covariances: Cov(σ_i, σ_j) pour chaque arête (i < j)
        bp_runs: nombre d'exécutions GaBP
    """

    ids: Tuple[int, ...]
    means: np.ndarray
    variances: np.ndarray
    edge_covariances: Dict[Tuple[int, int], float]
    bp_runs: int
    tracker: RunTracker = field(repr=False, default=None)

    def as_matrix(self) -> np.ndarray:
        """Matrice dense avec NaN hors diagonale et hors arêtes."""
        n = len(self.ids)
        pos = {i: p for p, i in enumerate(self.ids)}
        out = np.full((n, n), np.nan)
        out[np.arange(n), np.arange(n)] = self.variances
        for (i, j), value in self.edge_covariances.items():
            out[pos[i], pos[j]] = out[pos[j], pos[i]] = value
        return out


def covariance_by_cavity_runs(model: GaussianModel, schedule: Optional[Schedule] = None,
                              jobs: int = 1) -> CavityRunCovariance:
    """
    Variances v_i^LC et covariances d'arêtes Cov(σ_i, σ_j) = v_i κ_j^i par
    deux exécutions de GaBP pour chaque noeud.
    """
    schedule = schedule or Schedule()
    tracker = RunTracker("cavity_runs")
    results = _map_nodes(_node_correction, model, model.ids, schedule, jobs)
    # les moyennes GaBP sont exactes: une exécution sur le modèle non décalé suffit
    reference = run_gabp(model, schedule)
    tracker.add_run(reference.report)

    variances = np.empty(model.n)
    edges: Dict[Tuple[int, int], float] = {}
    for p, (i, (correction, shift, reports)) in enumerate(zip(model.ids, results)):
        for report in reports:
            tracker.add_run(report, retry=bool(shift))
        variances[p] = correction.variance
        for a, j in enumerate(correction.neighbors):
            if i < j:
                edges[(i, j)] = correction.variance * float(correction.kappa[a])

    means = reference.marginals.means.copy()
    tracker.log_summary()
    return CavityRunCovariance(model.ids, means, variances, edges, tracker.runs, tracker)

