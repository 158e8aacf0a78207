"""
Oracle dense exact pour les modèles gaussiens.

Moyennes et covariance par factorisation de Cholesky de la précision Λ
(scipy.linalg.cho_factor). Sert de vérité terrain à tous les algorithmes.
"""

from dataclasses import dataclass
import logging
from typing import Dict, Sequence, Tuple

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from ..errors import NotPositiveDefinite
from ..model import GaussianModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExactSolution:
    """Moyennes et covariance exactes, indexées dans l'ordre trié des ids."""

    ids: Tuple[int, ...]
    means: np.ndarray
    covariance: np.ndarray

    @property
    def index(self) -> Dict[int, int]:
        return {nid: p for p, nid in enumerate(self.ids)}

    @property
    def variances(self) -> np.ndarray:
        return np.diag(self.covariance).copy()

    def mean(self, i: int) -> float:
        return float(self.means[self.index[i]])

    def variance(self, i: int) -> float:
        p = self.index[i]
        return float(self.covariance[p, p])

    def block(self, ids: Sequence[int]) -> np.ndarray:
        """Sous-matrice de covariance sur les ids donnés (dans cet ordre)."""
        pos = [self.index[i] for i in ids]
        return self.covariance[np.ix_(pos, pos)].copy()

    def second_moments(self) -> np.ndarray:
        return self.covariance + np.outer(self.means, self.means)


def factorize(lam: np.ndarray):
    """
    Factorisation de Cholesky d'une matrice de précision.

    Raises:
        NotPositiveDefinite: si la matrice n'est pas définie positive
    """
    try:
        return cho_factor(lam, lower=True, check_finite=True)
    except (LinAlgError, ValueError) as e:
        raise NotPositiveDefinite(f"precision matrix is not positive definite: {e}") from e


def is_positive_definite(lam: np.ndarray) -> bool:
    if lam.size == 0:
        return True
    try:
        factorize(lam)
    except NotPositiveDefinite:
        return False
    return True


def exact_gaussian(model: GaussianModel) -> ExactSolution:
    """
    Solution exacte m = Λ⁻¹h, C = Λ⁻¹.

    Args:
        model (GaussianModel): modèle SPD

    Returns:
        ExactSolution: moyennes et covariance exactes
    """
    if model.n == 0:
        return ExactSolution((), np.zeros(0), np.zeros((0, 0)))
    lam, h = model.precision_matrix()
    factor = factorize(lam)
    means = cho_solve(factor, h)
    cov = cho_solve(factor, np.eye(model.n))
    cov = 0.5 * (cov + cov.T)
    return ExactSolution(model.ids, means, cov)


def exact_cavity(model: GaussianModel, i: int) -> ExactSolution:
    """Solution exacte sur le graphe cavité G\\{i}."""
    return exact_gaussian(model.remove_node(i))


def exact_cavity_covariances(model: GaussianModel):
    """
    Covariances cavité exactes A_i pour tous les noeuds.

    A_i est la partie hors diagonale de la covariance de G\\{i} restreinte
    à ∂i (voisins triés).

    Returns:
        CavityCovariance: un bloc par noeud
    """
    from ..core.lcbp import CavityCovariance

    blocks = {}
    for i in model.ids:
        nbrs = model.neighbors(i)
        if len(nbrs) < 2:
            blocks[i] = np.zeros((len(nbrs), len(nbrs)))
            continue
        block = exact_cavity(model, i).block(nbrs)
        np.fill_diagonal(block, 0.0)
        blocks[i] = block
    logger.debug(f"🧮 Exact cavity covariances for {model.n} nodes")
    return CavityCovariance.from_blocks(model, blocks)
