"""
Modèle gaussien à interactions par paires.

Ce module définit le modèle (champs μ_i, s_i et couplages J_ij), la
chirurgie de graphe (suppression d'un noeud pour les graphes cavité,
ajout d'un noeud pour les graphes croissants) et la validation.

Convention: précision Λ_ii = 1/s_i, Λ_ij = -J_ij, champ h_i = μ_i/s_i.
"""

from dataclasses import dataclass, field
from functools import cached_property
import logging
import math
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import DanglingNeighbor, DuplicateNode, ModelError, UnknownNode
from .potentials import NonlinearPotential

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Node:
    id: int
    mu: float
    s: float


@dataclass(frozen=True)
class Edge:
    """Arête non orientée, stockée une seule fois avec i < j."""

    i: int
    j: int
    J: float


def _check_node(node: Node) -> Node:
    if isinstance(node.id, bool) or int(node.id) != node.id or node.id < 0:
        raise ModelError(f"node id must be a non-negative integer, got {node.id!r}")
    mu, s = float(node.mu), float(node.s)
    if not math.isfinite(mu):
        raise ModelError(f"node {node.id}: mu must be finite, got {mu}")
    if not (math.isfinite(s) and s > 0):
        raise ModelError(f"node {node.id}: s must be finite and > 0, got {s}")
    return Node(int(node.id), mu, s)


def _check_edge(edge: Edge) -> Edge:
    i, j, J = int(edge.i), int(edge.j), float(edge.J)
    if i == j:
        raise ModelError(f"self-loop on node {i}")
    if not math.isfinite(J) or J == 0.0:
        raise ModelError(f"edge ({i}, {j}): J must be finite and non-zero, got {J}")
    if i > j:
        i, j = j, i
    return Edge(i, j, J)


@dataclass(frozen=True)
class ValidationReport:
    """Diagnostic structuré renvoyé par validate()."""

    n_nodes: int
    n_edges: int
    symmetric: bool
    positive_variances: bool
    spd: bool
    diagonally_dominant: bool

    def as_dict(self) -> dict:
        return {
            "n_nodes": self.n_nodes,
            "n_edges": self.n_edges,
            "symmetric": self.symmetric,
            "positive_variances": self.positive_variances,
            "spd": self.spd,
            "diagonally_dominant": self.diagonally_dominant,
        }


@dataclass(frozen=True)
class GaussianModel:
    """
    Modèle gaussien immuable.

    Les noeuds sont triés par id et les arêtes par (i, j). Les opérations
    de chirurgie renvoient de nouveaux modèles; une instance peut être
    partagée entre processus.
    """

    nodes: Tuple[Node, ...] = ()
    edges: Tuple[Edge, ...] = ()
    _adjacency: Dict[int, Dict[int, float]] = field(
        default=None, init=False, repr=False, compare=False, hash=False
    )

    def __post_init__(self):
        nodes = tuple(sorted((_check_node(n) for n in self.nodes), key=lambda n: n.id))
        adjacency: Dict[int, Dict[int, float]] = {}
        for n in nodes:
            if n.id in adjacency:
                raise DuplicateNode(f"duplicate node id {n.id}")
            adjacency[n.id] = {}

        edges = tuple(sorted((_check_edge(e) for e in self.edges), key=lambda e: (e.i, e.j)))
        for e in edges:
            for a in (e.i, e.j):
                if a not in adjacency:
                    raise DanglingNeighbor(f"edge ({e.i}, {e.j}) references unknown node {a}")
            if e.j in adjacency[e.i]:
                raise ModelError(f"duplicate edge ({e.i}, {e.j})")
            adjacency[e.i][e.j] = e.J
            adjacency[e.j][e.i] = e.J

        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "_adjacency", adjacency)

    # --- accès --------------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.nodes)

    @cached_property
    def ids(self) -> Tuple[int, ...]:
        return tuple(n.id for n in self.nodes)

    @cached_property
    def index(self) -> Dict[int, int]:
        """Position de chaque id dans l'ordre trié."""
        return {nid: p for p, nid in enumerate(self.ids)}

    @cached_property
    def mu(self) -> np.ndarray:
        return np.array([n.mu for n in self.nodes], dtype=float)

    @cached_property
    def s(self) -> np.ndarray:
        return np.array([n.s for n in self.nodes], dtype=float)

    def __contains__(self, node_id) -> bool:
        return node_id in self._adjacency

    def node(self, i: int) -> Node:
        return self.nodes[self._position(i)]

    def neighbors(self, i: int) -> Tuple[int, ...]:
        """Voisins ∂i triés par id croissant."""
        self._position(i)
        return tuple(sorted(self._adjacency[i]))

    def degree(self, i: int) -> int:
        self._position(i)
        return len(self._adjacency[i])

    def coupling(self, i: int, j: int) -> float:
        """J_ij, ou 0 s'il n'y a pas d'arête."""
        self._position(i)
        self._position(j)
        return self._adjacency[i].get(j, 0.0)

    def coupling_vector(self, i: int) -> np.ndarray:
        """Vecteur J_i indexé par les voisins triés."""
        return np.array([self._adjacency[i][k] for k in self.neighbors(i)], dtype=float)

    def _position(self, i: int) -> int:
        try:
            return self.index[i]
        except (KeyError, TypeError):
            raise UnknownNode(f"unknown node id {i!r}") from None

    # --- chirurgie ----------------------------------------------------------

    def remove_node(self, i: int) -> "GaussianModel":
        """Supprime le noeud i et ses arêtes (graphe cavité G\\{i})."""
        self._position(i)
        return GaussianModel(
            tuple(n for n in self.nodes if n.id != i),
            tuple(e for e in self.edges if i not in (e.i, e.j)),
        )

    def attach_node(self, node: Union[Node, Tuple[int, float, float]],
                    edges: Iterable[Tuple[int, float]] = ()) -> "GaussianModel":
        """
        Ajoute un noeud et ses arêtes vers des noeuds existants.

        Args:
            node: Node ou triplet (id, mu, s)
            edges: paires (id voisin, J)

        Returns:
            GaussianModel: le modèle étendu
        """
        if not isinstance(node, Node):
            node = Node(*node)
        if node.id in self._adjacency:
            raise DuplicateNode(f"node id {node.id} already present")
        new_edges = []
        for k, J in edges:
            if k not in self._adjacency:
                raise DanglingNeighbor(f"attach_node: neighbor {k} does not exist")
            new_edges.append(Edge(node.id, k, J))
        return GaussianModel(self.nodes + (node,), self.edges + tuple(new_edges))

    def shift_fields(self, delta: Union[float, Mapping[int, float]]) -> "GaussianModel":
        """Ajoute delta (scalaire ou par noeud) à chaque μ_i."""
        if isinstance(delta, Mapping):
            for i in delta:
                self._position(i)
            shift = {n.id: float(delta.get(n.id, 0.0)) for n in self.nodes}
        else:
            shift = {n.id: float(delta) for n in self.nodes}
        return GaussianModel(
            tuple(Node(n.id, n.mu + shift[n.id], n.s) for n in self.nodes),
            self.edges,
        )

    # --- algèbre ------------------------------------------------------------

    def precision_matrix(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        Matrice de précision dense et vecteur de champ.

        Returns:
            tuple: (Λ, h) indexés dans l'ordre trié des ids
        """
        n = self.n
        lam = np.zeros((n, n), dtype=float)
        lam[np.arange(n), np.arange(n)] = 1.0 / self.s
        for e in self.edges:
            p, q = self.index[e.i], self.index[e.j]
            lam[p, q] = lam[q, p] = -e.J
        return lam, self.mu / self.s

    def is_tree(self) -> bool:
        """Vrai si le graphe est une forêt (aucun cycle)."""
        parent = {i: i for i in self.ids}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in self.edges:
            a, b = find(e.i), find(e.j)
            if a == b:
                return False
            parent[a] = b
        return True

    def validate(self) -> ValidationReport:
        return validate(self)


@dataclass(frozen=True)
class PerturbedModel:
    """Modèle gaussien de base plus des potentiels V_i par noeud."""

    base: GaussianModel
    potentials: Mapping[int, NonlinearPotential] = field(default_factory=dict)

    def __post_init__(self):
        for i in self.potentials:
            if i not in self.base:
                raise UnknownNode(f"potential given for unknown node {i!r}")
        object.__setattr__(self, "potentials", dict(sorted(self.potentials.items())))

    def potential(self, i: int) -> NonlinearPotential:
        return self.potentials.get(i, NonlinearPotential.none())

    @property
    def is_gaussian(self) -> bool:
        return all(p.is_none for p in self.potentials.values())

    def potential_list(self) -> Tuple[NonlinearPotential, ...]:
        """Potentiels dans l'ordre trié des ids du modèle de base."""
        return tuple(self.potential(i) for i in self.base.ids)


# --- fonctions du module ----------------------------------------------------

def build(nodes: Iterable[Sequence], edges: Iterable[Sequence] = ()) -> GaussianModel:
    """Construit un modèle depuis des triplets (id, mu, s) et (i, j, J)."""
    return GaussianModel(tuple(Node(*n) for n in nodes), tuple(Edge(*e) for e in edges))


def remove_node(model: GaussianModel, i: int) -> GaussianModel:
    return model.remove_node(i)


def attach_node(model: GaussianModel, node, edges=()) -> GaussianModel:
    return model.attach_node(node, edges)


def precision_matrix(model: GaussianModel) -> Tuple[np.ndarray, np.ndarray]:
    return model.precision_matrix()


def validate(model: GaussianModel) -> ValidationReport:
    """
    Diagnostic du modèle.

    Le drapeau SPD vient de la factorisation de l'oracle; la dominance
    diagonale vaut 1/s_i > Σ_j |J_ij| pour tout i.
    """
    from ..oracle.exact import is_positive_definite

    lam, _ = model.precision_matrix()
    abs_sum = np.abs(lam).sum(axis=1) - np.abs(np.diag(lam))
    dominant = bool(np.all(np.diag(lam) > abs_sum)) if model.n else True
    report = ValidationReport(
        n_nodes=model.n,
        n_edges=len(model.edges),
        symmetric=bool(np.array_equal(lam, lam.T)),
        positive_variances=bool(np.all(model.s > 0)),
        spd=is_positive_definite(lam),
        diagonally_dominant=dominant,
    )
    if not report.spd:
        logger.warning(f"⚠️ Precision matrix is not positive definite ({model.n} nodes)")
    return report
