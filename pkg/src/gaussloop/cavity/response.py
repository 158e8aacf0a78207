"""
Propagation de réponse linéaire sur un graphe cavité.

Sur G\\{i}, les dérivées des moyennes de messages par rapport aux champs
μ_k (k ∈ ∂i) suivent la récursion linéaire

    ∂m_l^j/∂μ_k = v_l^j [δ_lk/s_k + Σ_{n∈∂l\\j} J_ln ∂m_n^l/∂μ_k]

avec les variances de messages figées au point fixe de GaBP. On en déduit
Cov(σ_j, σ_k) = s_k ∂m_j/∂μ_k, puis A_i = partie hors diagonale symétrisée.
"""

from dataclasses import dataclass
import logging
from typing import Optional, Tuple

import numpy as np

from ..core import BPRun, Schedule, edge_index, iterate, run_gabp
from ..core.schedule import RunReport
from ..errors import CavityGraphNotConverged
from ..model import GaussianModel

logger = logging.getLogger(__name__)


@dataclass
class ResponseState:
    """
    Dérivées sur le graphe cavité de i.

    Attributes:
        node: noeud retiré i
        neighbors: ∂i trié (colonnes k et lignes j)
        derivatives: matrice ∂m_j/∂μ_k pour j, k ∈ ∂i
        message_derivatives: ∂m_l^j/∂μ_k par arête orientée du graphe cavité
        cavity_run: exécution GaBP sur G\\{i}
        report: rapport de la récursion linéaire
    """

    node: int
    neighbors: Tuple[int, ...]
    derivatives: np.ndarray
    message_derivatives: np.ndarray
    cavity_run: BPRun
    report: RunReport

    @property
    def covariance(self) -> np.ndarray:
        """Cov(σ_j, σ_k) = s_k ∂m_j/∂μ_k, non symétrisée."""
        s = np.array([self.cavity_run.messages.index.s[self.cavity_run.messages.index.pos(k)]
                      for k in self.neighbors])
        return self.derivatives * s[None, :]

    @property
    def asymmetry(self) -> float:
        cov = self.covariance
        return float(np.abs(cov - cov.T).max(initial=0.0))

    def cavity_covariance(self) -> np.ndarray:
        """Covariance complète (diagonale incluse) de ∂i sur G\\{i}, symétrisée."""
        cov = self.covariance
        return 0.5 * (cov + cov.T)

    def off_diagonal(self) -> np.ndarray:
        """A_i: partie hors diagonale de la covariance symétrisée."""
        block = self.cavity_covariance()
        np.fill_diagonal(block, 0.0)
        return block


def response_state(model: GaussianModel, i: int, schedule: Optional[Schedule] = None,
                   cavity_run: Optional[BPRun] = None) -> ResponseState:
    """
    Itère la récursion des dérivées de messages sur G\\{i}.

    Args:
        model (GaussianModel): modèle complet
        i (int): noeud retiré
        schedule (Schedule): paramètres d'itération (partagés avec GaBP)
        cavity_run (BPRun): exécution GaBP déjà faite sur G\\{i}

    Returns:
        ResponseState: dérivées et rapports (sans lever si non convergé)
    """
    schedule = schedule or Schedule()
    neighbors = model.neighbors(i)
    cavity = model.remove_node(i)
    if cavity_run is None:
        cavity_run = run_gabp(cavity, schedule)

    index = edge_index(cavity)
    v = cavity_run.messages.v
    k = len(neighbors)
    cols = np.array([index.pos(j) for j in neighbors], dtype=int)
    # second membre δ_lk/s_k par position de noeud
    rhs = np.zeros((len(index.ids), k))
    rhs[cols, np.arange(k)] = 1.0 / index.s[cols]

    def step(dm, rng):
        residual = 0.0
        for e in schedule.sweep_order(len(index), rng):
            p, slot = index.src[e], index.slot[e]
            J = index.couplings[p].copy()
            J[slot] = 0.0
            new = v[e] * (rhs[p] + J @ dm[index.incoming[p]])
            new = schedule.mix(new, dm[e])
            residual = max(residual, float(np.abs(new - dm[e]).max(initial=0.0)))
            dm[e] = new
        return dm, residual, 0

    dm0 = np.zeros((len(index), k))
    dm, report = iterate(step, dm0, schedule, f"response[{i}]")

    derivatives = np.empty((k, k))
    for row, p in enumerate(cols):
        J = index.couplings[p]
        derivatives[row] = cavity_run.marginals.variances[p] * (rhs[p] + J @ dm[index.incoming[p]])
    return ResponseState(i, neighbors, derivatives, dm, cavity_run, report)


def response_propagation(model: GaussianModel, i: int, schedule: Optional[Schedule] = None) -> np.ndarray:
    """
    A_i par propagation de réponse sur G\\{i}.

    Returns:
        np.ndarray: A_i (|∂i|×|∂i|, diagonale nulle, symétrique)

    Raises:
        CavityGraphNotConverged: si GaBP ne converge pas sur G\\{i}
        NonConvergence: si la récursion des dérivées ne converge pas
    """
    state = response_state(model, i, schedule)
    if not state.cavity_run.report.converged:
        raise CavityGraphNotConverged(
            f"GaBP on the cavity graph of node {i} did not converge", report=state.cavity_run.report
        )
    state.report.raise_for_convergence()
    logger.debug(f"📊 Response A_{i}: asymmetry {state.asymmetry:.2e}")
    return state.off_diagonal()
