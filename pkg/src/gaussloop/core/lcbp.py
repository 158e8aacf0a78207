"""
Propagation de croyance à boucles corrigées (LCBP).

Les matrices de covariance cavité A_i (hors diagonale, indexées par les
voisins triés de i) sont une entrée; ce module ne les estime pas.

Dépendances:
    - core.sweep: noyau de mise à jour partagé avec GaBP
"""

from dataclasses import dataclass
import json
import logging
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple, Union

import numpy as np

from ..errors import ModelError, ShapeMismatch, UnknownNode
from ..model import GaussianModel
from .messages import BPRun, EdgeIndex, MarginalSet, MessageSet, edge_index, init_messages
from .schedule import Schedule, iterate
from .sweep import MessageKernel

logger = logging.getLogger(__name__)

SYMMETRY_RTOL = 1e-9


def _as_block(matrix, k: int, i: int) -> np.ndarray:
    """Bloc k×k de A_i, ShapeMismatch si les valeurs ne s'y prêtent pas."""
    if k == 0:
        return np.zeros((0, 0))
    try:
        return np.array(matrix, dtype=float).reshape(k, k)
    except (TypeError, ValueError) as e:
        raise ShapeMismatch(f"A_{i} cannot be read as a {k}x{k} matrix: {e}") from e


@dataclass
class CavityCovariance:
    """
    Blocs A_i par noeud, de forme |∂i|×|∂i|, diagonale nulle, symétriques.
    """

    neighbors: Dict[int, Tuple[int, ...]]
    blocks: Dict[int, np.ndarray]

    @classmethod
    def zeros(cls, model: GaussianModel) -> "CavityCovariance":
        return cls.from_blocks(model, {})

    @classmethod
    def from_blocks(cls, model: GaussianModel, blocks: Mapping[int, np.ndarray]) -> "CavityCovariance":
        """
        Construit et vérifie les blocs pour un modèle.

        Les noeuds de degré < 2 absents de blocks reçoivent un bloc nul.

        Raises:
            UnknownNode: bloc pour un noeud inconnu
            ShapeMismatch: forme incompatible avec ∂i ou bloc manquant
            ModelError: diagonale non nulle ou bloc non symétrique
        """
        for i in blocks:
            if i not in model:
                raise UnknownNode(f"cavity covariance given for unknown node {i!r}")
        neighbors, checked = {}, {}
        for i in model.ids:
            nbrs = model.neighbors(i)
            k = len(nbrs)
            if i not in blocks:
                if k >= 2:
                    raise ShapeMismatch(f"missing cavity covariance for node {i} (degree {k})")
                block = np.zeros((k, k))
            else:
                block = _as_block(blocks[i], k, i)
                if block.shape != (k, k):
                    raise ShapeMismatch(f"A_{i} has shape {block.shape}, expected {(k, k)}")
            if np.any(np.diag(block) != 0.0):
                raise ModelError(f"A_{i} must have a zero diagonal")
            scale = max(1.0, float(np.abs(block).max(initial=0.0)))
            if np.abs(block - block.T).max(initial=0.0) > SYMMETRY_RTOL * scale:
                raise ModelError(f"A_{i} is not symmetric")
            neighbors[i] = nbrs
            checked[i] = block
        return cls(neighbors, checked)

    def block(self, i: int) -> np.ndarray:
        try:
            return self.blocks[i]
        except KeyError:
            raise UnknownNode(f"no cavity covariance for node {i!r}") from None

    def is_zero(self) -> bool:
        return all(not np.any(b) for b in self.blocks.values())

    def kernel_blocks(self, index: EdgeIndex) -> List[Optional[np.ndarray]]:
        """Blocs alignés sur les positions de l'index (None pour les blocs vides)."""
        out = []
        for p, i in enumerate(index.ids):
            block = self.blocks.get(i)
            if block is None or len(self.neighbors[i]) != len(index.neighbors[p]):
                raise ShapeMismatch(f"cavity covariance does not match the neighborhood of node {i}")
            out.append(block if block.size else None)
        return out

    # --- sérialisation JSON ----------------------------------------------------

    def to_records(self) -> List[dict]:
        return [
            {"node": i, "neighbors": list(self.neighbors[i]), "A": self.blocks[i].tolist()}
            for i in sorted(self.blocks)
        ]

    @classmethod
    def from_records(cls, records: List[dict], model: GaussianModel) -> "CavityCovariance":
        if not isinstance(records, list):
            raise ModelError("cavity covariance file must hold a JSON array of records")
        blocks = {}
        for r in records:
            try:
                i, nbrs, matrix = r["node"], tuple(r["neighbors"]), r["A"]
            except (KeyError, TypeError) as e:
                raise ModelError(f"malformed cavity covariance record: {e}") from e
            if i not in model:
                raise UnknownNode(f"cavity covariance given for unknown node {i!r}")
            if nbrs != model.neighbors(i):
                raise ShapeMismatch(
                    f"node {i}: neighbors {list(nbrs)} do not match the model {list(model.neighbors(i))}"
                )
            blocks[i] = _as_block(matrix, len(nbrs), i)
        return cls.from_blocks(model, blocks)

    def dumps(self) -> str:
        return json.dumps(self.to_records(), indent=2, allow_nan=False) + "\n"

    @classmethod
    def load(cls, path: Union[str, Path], model: GaussianModel) -> "CavityCovariance":
        path = Path(path)
        try:
            records = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ModelError(f"cannot read cavity covariance file {path}: {e}") from e
        logger.info(f"📂 Loaded cavity covariances from {path}")
        return cls.from_records(records, model)


@dataclass
class CavityAux:
    """α_i^j et ε_j^i par arête orientée (i→j), α_i par noeud."""

    index: EdgeIndex
    alpha_edge: np.ndarray
    eps_edge: np.ndarray
    alpha_node: np.ndarray

    def alpha_ij(self, i: int, j: int) -> float:
        """α_i^j."""
        return float(self.alpha_edge[self.index.edge(i, j)])

    def epsilon(self, j: int, i: int) -> float:
        """ε_j^i = [A_j J_j^i]_i, utilisé par la mise à jour du message i→j."""
        return float(self.eps_edge[self.index.edge(i, j)])

    def alpha_i(self, i: int) -> float:
        return float(self.alpha_node[self.index.pos(i)])


def _kernel(model: GaussianModel, A: Optional[CavityCovariance]) -> MessageKernel:
    index = edge_index(model)
    return MessageKernel(index, A.kernel_blocks(index) if A is not None else None)


def compute_aux(model: GaussianModel, messages: MessageSet, A: CavityCovariance) -> CavityAux:
    """
    α_i^j = J_i^jᵀ(D_i + A_i)J_i^j, α_i et ε_j^i à partir des messages.

    Raises:
        ShapeMismatch: si un bloc A_i ne correspond pas à |∂i|
    """
    kernel = _kernel(model, A)
    index = kernel.index
    alpha_edge = np.array([kernel.alpha(messages.v, index.src[e], index.slot[e])
                           for e in range(len(index))])
    alpha_node = np.array([kernel.alpha(messages.v, p) for p in range(len(index.ids))])
    return CavityAux(index, alpha_edge, kernel.eps.copy(), alpha_node)


def lcbp_step(model: GaussianModel, messages: MessageSet, A: CavityCovariance,
              schedule: Schedule, rng=None) -> Tuple[MessageSet, float, int]:
    """
    Un balayage LCBP sur une copie des messages.

    Returns:
        tuple: (nouveaux messages, résidu, mises à jour ignorées)
    """
    kernel = _kernel(model, A)
    new = messages.copy()
    residual, skipped = kernel.sweep(new, schedule, rng if rng is not None else schedule.rng())
    return new, residual, skipped


def run_lcbp(model: GaussianModel, A: CavityCovariance, schedule: Optional[Schedule] = None,
             messages: Optional[MessageSet] = None) -> BPRun:
    """
    Itère LCBP jusqu'à convergence puis calcule les marginales
    v_i = s_i/(1 - s_i α_i), m_i = v_i(μ_i/s_i + Σ J_il m_l^i).

    Args:
        model (GaussianModel): modèle à résoudre
        A (CavityCovariance): covariances cavité (non modifiées)
        schedule (Schedule): paramètres d'itération
        messages (MessageSet): messages initiaux

    Returns:
        BPRun: (messages, marginales, rapport)
    """
    schedule = schedule or Schedule()
    kernel = _kernel(model, A)
    state = messages.copy() if messages is not None else init_messages(model)

    def step(msgs, rng):
        residual, skipped = kernel.sweep(msgs, schedule, rng)
        return msgs, residual, skipped

    state, report = iterate(step, state, schedule, "lcbp")
    means, variances = kernel.marginals(state)
    return BPRun(state, MarginalSet(model.ids, means, variances), report)


def update_d_residuals(model: GaussianModel, messages: MessageSet, A: CavityCovariance) -> np.ndarray:
    """
    Résidus de l'identité des variances au point fixe, par arête (i→j):
    |v_i^j + s_j (ε_j^i)² / (1 - s_j α_j^i) - s_i / (1 - s_i α_i^j)|.
    """
    aux = compute_aux(model, messages, A)
    index = aux.index
    s = index.s
    out = np.empty(len(index))
    for e in range(len(index)):
        r = index.reverse[e]
        vhat_i = s[index.src[e]] / (1.0 - s[index.src[e]] * aux.alpha_edge[e])
        vhat_j = s[index.src[r]] / (1.0 - s[index.src[r]] * aux.alpha_edge[r])
        out[e] = abs(messages.v[e] + aux.eps_edge[e] ** 2 * vhat_j - vhat_i)
    return out


@dataclass
class LocalMoments:
    """Moyennes et covariance jointes du noeud i et de ses voisins."""

    ids: Tuple[int, ...]
    means: np.ndarray
    covariance: np.ndarray


def lcbp_marginal_moments(model: GaussianModel, messages: MessageSet, A: CavityCovariance,
                          i: int) -> LocalMoments:
    """
    Moments joints de (σ_i, σ_∂i) sous la cavité gaussienne N(m^i, D_i + A_i).

    Avec C = D_i + A_i et J = J_i:
    v_i = 1/(1/s_i - JᵀCJ), m_i = v_i(μ_i/s_i + Jᵀm^i),
    Cov(σ_i, σ_∂i) = v_i CJ, E[σ_∂i] = m^i + CJ m_i,
    Cov(σ_∂i) = C + v_i (CJ)(CJ)ᵀ.
    """
    index = edge_index(model)
    p = index.pos(i)
    node = model.node(i)
    inc = index.incoming[p]
    J = index.couplings[p]
    C = np.diag(messages.v[inc]) + A.block(i)
    cavity_mean = messages.m[inc]
    CJ = C @ J
    v_i = 1.0 / (1.0 / node.s - J @ CJ)
    m_i = v_i * (node.mu / node.s + J @ cavity_mean)

    k = len(inc)
    means = np.empty(k + 1)
    cov = np.empty((k + 1, k + 1))
    means[0] = m_i
    means[1:] = cavity_mean + CJ * m_i
    cov[0, 0] = v_i
    cov[0, 1:] = cov[1:, 0] = v_i * CJ
    cov[1:, 1:] = C + v_i * np.outer(CJ, CJ)
    return LocalMoments((i,) + index.neighbors[p], means, cov)
