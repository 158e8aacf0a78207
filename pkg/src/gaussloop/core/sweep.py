"""
Noyau de mise à jour des messages partagé par GaBP, LCBP et LC-EP.

Pour l'arête e = (i→j), avec J_i^j le vecteur des couplages de i dont
l'entrée j est mise à zéro:

    α_i^j = J_i^jᵀ (D_i + A_i) J_i^j
    v̂_i^j = s_i / (1 - s_i α_i^j)
    m̂_i^j = v̂_i^j (μ_i/s_i + Σ_{k∈∂i\\j} J_ik m_k^i)
    ε_j^i = [A_j J_j^i]_i

puis v_i^j = v̂_i^j - (ε_j^i)² v̂_j^i et m_i^j = m̂_i^j - ε_j^i m̂_j^i.
Avec A = 0 on retrouve exactement la mise à jour de GaBP.
"""

import logging
from typing import List, Optional, Tuple

import numpy as np

from ..errors import NegativeCavityPrecision
from .messages import EdgeIndex, MessageSet

logger = logging.getLogger(__name__)


class MessageKernel:
    """
    Évaluation des quantités chapeautées pour un index et des blocs A_i fixes.

    Args:
        index (EdgeIndex): index des arêtes orientées
        blocks: liste (par position de noeud) de matrices A_i, ou None pour A = 0
    """

    def __init__(self, index: EdgeIndex, blocks: Optional[List[Optional[np.ndarray]]] = None):
        self.index = index
        n = len(index.ids)
        self.blocks = blocks if blocks is not None else [None] * n
        # ε par arête (i→j): ε_j^i, indépendant des messages
        self.eps = np.zeros(len(index))
        for e in range(len(index)):
            r = index.reverse[e]
            block = self.blocks[index.src[r]]
            if block is not None:
                self.eps[e] = float(block[index.slot[r]] @ index.couplings[index.src[r]])

    def alpha(self, v: np.ndarray, p: int, skip_slot: Optional[int] = None) -> float:
        """α du noeud p (α_i si skip_slot est None, sinon α_i^j)."""
        J = self.index.couplings[p]
        if skip_slot is not None:
            J = J.copy()
            J[skip_slot] = 0.0
        a = float(np.dot(J * J, v[self.index.incoming[p]]))
        block = self.blocks[p]
        if block is not None:
            a += float(J @ block @ J)
        return a

    def field(self, m: np.ndarray, p: int, skip_slot: Optional[int] = None) -> float:
        """μ_i/s_i + Σ J_ik m_k^i, sans le voisin skip_slot."""
        J = self.index.couplings[p]
        if skip_slot is not None:
            J = J.copy()
            J[skip_slot] = 0.0
        return float(self.index.h[p] + np.dot(J, m[self.index.incoming[p]]))

    def hatted(self, m: np.ndarray, v: np.ndarray, e: int) -> Optional[Tuple[float, float]]:
        """(m̂_i^j, v̂_i^j) pour l'arête e, ou None si 1 - s_i α_i^j ≤ 0."""
        p, slot = self.index.src[e], self.index.slot[e]
        s = self.index.s[p]
        den = 1.0 - s * self.alpha(v, p, slot)
        if not den > 0.0:
            return None
        vhat = s / den
        return vhat * self.field(m, p, slot), vhat

    def node_hatted(self, m: np.ndarray, v: np.ndarray, p: int) -> Optional[Tuple[float, float]]:
        """(m̂_i, v̂_i) au niveau du noeud, ou None si 1 - s_i α_i ≤ 0."""
        s = self.index.s[p]
        den = 1.0 - s * self.alpha(v, p)
        if not den > 0.0:
            return None
        vhat = s / den
        return vhat * self.field(m, p), vhat

    def update(self, m: np.ndarray, v: np.ndarray, e: int) -> Optional[Tuple[float, float]]:
        """Nouveau message (m_i^j, v_i^j), ou None si une précision est négative."""
        own = self.hatted(m, v, e)
        if own is None:
            return None
        eps = self.eps[e]
        if eps == 0.0:
            return own
        other = self.hatted(m, v, self.index.reverse[e])
        if other is None:
            return None
        return own[0] - eps * other[0], own[1] - eps * eps * other[1]

    def sweep(self, messages: MessageSet, schedule, rng) -> Tuple[float, int]:
        """
        Un balayage en place (Gauss-Seidel) dans l'ordre du schedule.

        Returns:
            tuple: (résidu = changement absolu maximal, mises à jour ignorées)
        """
        m, v = messages.m, messages.v
        residual = 0.0
        skipped = 0
        for e in schedule.sweep_order(len(self.index), rng):
            new = self.update(m, v, e)
            if new is None:
                if schedule.strict:
                    i, j = self.index.pairs[e]
                    raise NegativeCavityPrecision(f"non-positive cavity precision on edge {i} -> {j}")
                skipped += 1
                continue
            new_m = schedule.mix(new[0], m[e])
            new_v = schedule.mix(new[1], v[e])
            residual = max(residual, abs(new_m - m[e]), abs(new_v - v[e]))
            m[e], v[e] = new_m, new_v
        return residual, skipped

    def marginals(self, messages: MessageSet) -> Tuple[np.ndarray, np.ndarray]:
        """Marginales v_i = s_i/(1 - s_i α_i), m_i = v_i(μ_i/s_i + Σ J_il m_l^i)."""
        n = len(self.index.ids)
        means = np.full(n, np.nan)
        variances = np.full(n, np.nan)
        for p in range(n):
            hat = self.node_hatted(messages.m, messages.v, p)
            if hat is None:
                logger.warning(f"⚠️ Non-positive marginal precision at node {self.index.ids[p]}")
                continue
            means[p], variances[p] = hat
        return means, variances
