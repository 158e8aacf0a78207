"""
Correction de variance et covariances à partir de deux exécutions de BP.

Pour le noeud i, GaBP sur le modèle complet et GaBP sur G\\{i} suffisent
à reconstruire la variance exacte de i et ses covariances avec ∂i:

    κ_j^i = J_ij v_j^{iBP} - (m_j^{(i)BP} - m_j^{iBP}) / m_i^BP   (= {(D_i+A_i)J_i}_j)
    u_j^i = m_j^{(i)BP} + m_i^BP κ_j^i
    v_i^LC = s_i / (1 - s_i Σ_j J_ij κ_j^i)

Ces relations demandent m_i^BP ≠ 0; sinon on décale tous les champs.
"""

from dataclasses import dataclass
import logging
from typing import Optional, Tuple

import numpy as np

from ..core import BPRun, Schedule, run_gabp
from ..errors import DegenerateMean, NegativeCavityPrecision, NonConvergence, ShapeMismatch
from ..model import GaussianModel

logger = logging.getLogger(__name__)

DEGENERATE_RTOL = 1e-6
FIELD_SHIFT = 1.0


def degenerate_threshold(model: GaussianModel) -> float:
    """Seuil 1e-6 · max(1, max|μ|) sous lequel m_i^BP est dégénérée."""
    top = float(np.abs(model.mu).max(initial=0.0))
    return DEGENERATE_RTOL * max(1.0, top)


@dataclass
class CavityBPPair:
    """Exécutions GaBP sur le modèle et sur G\\{i}, éventuellement décalés."""

    node: int
    model: GaussianModel
    full: BPRun
    cavity: BPRun
    shift: float = 0.0
    bp_runs: int = 2


@dataclass
class CavityCorrection:
    """
    Quantités κ, u et moments du noeud i.

    Attributes:
        node: noeud i
        neighbors: ∂i trié
        kappa: κ_j^i pour j ∈ ∂i
        u: u_j^i pour j ∈ ∂i
        cavity_means: m_j^{(i)BP} pour j ∈ ∂i
        variance: v_i^LC
        mean: m_i^BP
    """

    node: int
    neighbors: Tuple[int, ...]
    kappa: np.ndarray
    u: np.ndarray
    cavity_means: np.ndarray
    variance: float
    mean: float


def cavity_bp_pair(model: GaussianModel, i: int, schedule: Optional[Schedule] = None) -> CavityBPPair:
    """
    Exécute GaBP sur le modèle et sur G\\{i}, avec décalage des champs si
    |m_i^BP| est sous le seuil de dégénérescence.

    Raises:
        DegenerateMean: si la moyenne reste dégénérée après décalage
    """
    schedule = schedule or Schedule()
    full = run_gabp(model, schedule)
    cavity = run_gabp(model.remove_node(i), schedule)
    if abs(full.marginals.mean(i)) >= degenerate_threshold(model):
        return CavityBPPair(i, model, full, cavity)

    logger.info(f"🔁 Degenerate BP mean at node {i}, shifting all fields by {FIELD_SHIFT}")
    shifted = model.shift_fields(FIELD_SHIFT)
    full = run_gabp(shifted, schedule)
    cavity = run_gabp(shifted.remove_node(i), schedule)
    if abs(full.marginals.mean(i)) < degenerate_threshold(shifted):
        raise DegenerateMean(f"BP mean of node {i} stays ~0 after a field shift of {FIELD_SHIFT}")
    return CavityBPPair(i, shifted, full, cavity, shift=FIELD_SHIFT, bp_runs=4)


def kappa_u(model: GaussianModel, i: int, gabp_full: BPRun, gabp_cavity: BPRun) -> CavityCorrection:
    """
    κ_j^i, u_j^i et v_i^LC pour j ∈ ∂i.

    Args:
        model (GaussianModel): modèle sur lequel gabp_full a été exécuté
        i (int): noeud central
        gabp_full (BPRun): GaBP convergé sur model
        gabp_cavity (BPRun): GaBP convergé sur model.remove_node(i)

    Raises:
        NonConvergence: si une des exécutions n'a pas convergé
        DegenerateMean: si |m_i^BP| est sous le seuil
        NegativeCavityPrecision: si 1 - s_i Σ J_ij κ_j ≤ 0
    """
    for run, label in ((gabp_full, "full graph"), (gabp_cavity, f"cavity graph of {i}")):
        if not run.report.converged:
            raise NonConvergence(f"GaBP on the {label} did not converge", report=run.report)
    m_i = gabp_full.marginals.mean(i)
    if abs(m_i) < degenerate_threshold(model):
        raise DegenerateMean(f"BP mean of node {i} is {m_i:.3e}, below the degenerate threshold")

    nbrs = model.neighbors(i)
    J = model.coupling_vector(i)
    msg_m = np.array([gabp_full.messages.mean(j, i) for j in nbrs])
    msg_v = np.array([gabp_full.messages.variance(j, i) for j in nbrs])
    c = np.array([gabp_cavity.marginals.mean(j) for j in nbrs])

    kappa = J * msg_v - (c - msg_m) / m_i
    s_i = model.node(i).s
    den = 1.0 - s_i * float(J @ kappa)
    if not den > 0.0:
        raise NegativeCavityPrecision(f"corrected precision of node {i} is not positive")
    return CavityCorrection(i, nbrs, kappa, c + m_i * kappa, c, s_i / den, m_i)


def lc_variance_via_cavity_bp(model: GaussianModel, i: int, gabp_full: BPRun,
                              gabp_cavity: BPRun) -> float:
    """v_i^LC = s_i / (1 - s_i Σ_j J_ij κ_j^i)."""
    return kappa_u(model, i, gabp_full, gabp_cavity).variance


def lc_variance(model: GaussianModel, i: int, schedule: Optional[Schedule] = None) -> float:
    """v_i^LC avec les deux exécutions de GaBP et le décalage de champ si besoin."""
    pair = cavity_bp_pair(model, i, schedule)
    return lc_variance_via_cavity_bp(pair.model, i, pair.full, pair.cavity)


def covariance_entries(model: GaussianModel, i: int, kappa: np.ndarray, u: np.ndarray,
                       v_i: float, m_i: float, inherited: np.ndarray) -> np.ndarray:
    """
    Seconds moments de (σ_i, σ_∂i).

    ⟨σ_i²⟩ = v_i + m_i², ⟨σ_iσ_j⟩ = m_i u_j + v_i κ_j,
    ⟨σ_jσ_k⟩ = u_j u_k + v_i κ_j κ_k + C^{(i)}_jk
    où C^{(i)} est la covariance connexe de ∂i sur G\\{i} (diagonale comprise).

    Returns:
        np.ndarray: matrice (1+|∂i|)² ordonnée (i, ∂i trié)
    """
    k = len(model.neighbors(i))
    inherited = np.asarray(inherited, dtype=float)
    if inherited.shape != (k, k):
        raise ShapeMismatch(f"inherited block has shape {inherited.shape}, expected {(k, k)}")
    out = np.empty((k + 1, k + 1))
    out[0, 0] = v_i + m_i * m_i
    out[0, 1:] = out[1:, 0] = m_i * u + v_i * kappa
    out[1:, 1:] = np.outer(u, u) + v_i * np.outer(kappa, kappa) + inherited
    return out


def nearest_neighbor_moment(correction: CavityCorrection, j: int) -> float:
    """⟨σ_iσ_j⟩ = m_i m_j^{(i)} + (m_i² + v_i) κ_j^i."""
    a = correction.neighbors.index(j)
    m_i, v_i = correction.mean, correction.variance
    return m_i * correction.cavity_means[a] + (m_i * m_i + v_i) * correction.kappa[a]


def next_nearest_neighbor_moment(correction: CavityCorrection, j: int, k: int,
                                 inherited_jk: float) -> float:
    """
    ⟨σ_jσ_k⟩ pour j, k ∈ ∂i, à partir des moyennes cavité et de la
    covariance connexe C^{(i)}_jk.
    """
    a, b = correction.neighbors.index(j), correction.neighbors.index(k)
    c, kappa = correction.cavity_means, correction.kappa
    m_i, v_i = correction.mean, correction.variance
    return (c[a] * c[b] + m_i * (c[a] * kappa[b] + c[b] * kappa[a])
            + (m_i * m_i + v_i) * kappa[a] * kappa[b] + inherited_jk)
