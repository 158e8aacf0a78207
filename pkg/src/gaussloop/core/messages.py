"""
Structures de messages.

EdgeIndex numérote les arêtes orientées (i→j) triées par (i, j) et
précalcule les voisinages; MessageSet stocke (m_i^j, v_i^j) par arête
orientée; MarginalSet stocke (m_i, v_i) par noeud.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, NamedTuple, Tuple

import numpy as np

from ..errors import UnknownNode
from ..model import GaussianModel


class EdgeIndex:
    """
    Index des arêtes orientées d'un modèle.

    Pour l'arête e = (i→j): src[e] = position de i, slot[e] = rang de j
    dans ∂i trié, reverse[e] = index de (j→i). Pour le noeud p:
    incoming[p] = arêtes (k→i) dans l'ordre de ∂i, couplings[p] = J_i.
    """

    def __init__(self, model: GaussianModel):
        self.ids = model.ids
        self.node_pos = model.index
        self.s = model.s.copy()
        self.mu = model.mu.copy()
        self.h = self.mu / self.s if model.n else np.zeros(0)

        pairs = sorted((i, j) for e in model.edges for (i, j) in ((e.i, e.j), (e.j, e.i)))
        self.pairs: List[Tuple[int, int]] = pairs
        self.position: Dict[Tuple[int, int], int] = {p: e for e, p in enumerate(pairs)}
        self.neighbors = [model.neighbors(i) for i in self.ids]
        self.couplings = [model.coupling_vector(i) for i in self.ids]
        self.incoming = [
            np.array([self.position[(k, i)] for k in nbrs], dtype=int)
            for i, nbrs in zip(self.ids, self.neighbors)
        ]

        n_edges = len(pairs)
        self.src = np.empty(n_edges, dtype=int)
        self.dst = np.empty(n_edges, dtype=int)
        self.slot = np.empty(n_edges, dtype=int)
        self.reverse = np.empty(n_edges, dtype=int)
        self.coupling = np.empty(n_edges, dtype=float)
        for e, (i, j) in enumerate(pairs):
            p = self.node_pos[i]
            self.src[e] = p
            self.dst[e] = self.node_pos[j]
            self.slot[e] = self.neighbors[p].index(j)
            self.reverse[e] = self.position[(j, i)]
            self.coupling[e] = model.coupling(i, j)

    def __len__(self) -> int:
        return len(self.pairs)

    def edge(self, i: int, j: int) -> int:
        try:
            return self.position[(i, j)]
        except KeyError:
            raise UnknownNode(f"no directed edge ({i} -> {j})") from None

    def pos(self, i: int) -> int:
        try:
            return self.node_pos[i]
        except KeyError:
            raise UnknownNode(f"unknown node id {i!r}") from None


@lru_cache(maxsize=128)
def edge_index(model: GaussianModel) -> EdgeIndex:
    return EdgeIndex(model)


@dataclass
class MessageSet:
    """Messages (m_i^j, v_i^j) alignés sur index.pairs."""

    index: EdgeIndex
    m: np.ndarray
    v: np.ndarray

    def get(self, i: int, j: int) -> Tuple[float, float]:
        e = self.index.edge(i, j)
        return float(self.m[e]), float(self.v[e])

    def mean(self, i: int, j: int) -> float:
        return float(self.m[self.index.edge(i, j)])

    def variance(self, i: int, j: int) -> float:
        return float(self.v[self.index.edge(i, j)])

    def copy(self) -> "MessageSet":
        return MessageSet(self.index, self.m.copy(), self.v.copy())


@dataclass
class MarginalSet:
    """Marginales (m_i, v_i) dans l'ordre trié des ids."""

    ids: Tuple[int, ...]
    means: np.ndarray
    variances: np.ndarray

    def _pos(self, i: int) -> int:
        try:
            return self.ids.index(i)
        except ValueError:
            raise UnknownNode(f"unknown node id {i!r}") from None

    def mean(self, i: int) -> float:
        return float(self.means[self._pos(i)])

    def variance(self, i: int) -> float:
        return float(self.variances[self._pos(i)])


class BPRun(NamedTuple):
    """Résultat d'une exécution: messages, marginales et rapport."""

    messages: MessageSet
    marginals: MarginalSet
    report: "RunReport"  # noqa: F821


def init_messages(model: GaussianModel) -> MessageSet:
    """Initialisation m_i^j = μ_i, v_i^j = s_i (point fixe à couplage nul)."""
    index = edge_index(model)
    return MessageSet(index, index.mu[index.src].copy(), index.s[index.src].copy())
