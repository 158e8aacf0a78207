"""
EP à boucles corrigées et formalisme alternatif.

Variante "lc": chaque message (m_i^j, v_i^j) est une différence de moments
sous Φ_i^j(σ) = (σ - m̂_i^j)²/(2v̂_i^j) + V_i(σ) et Φ_j^i:

    m_i^j = ⟨σ⟩_{Φ_i^j} - ε_j^i ⟨τ⟩_{Φ_j^i}
    v_i^j = Var_{Φ_i^j}(σ) - (ε_j^i)² Var_{Φ_j^i}(τ)

Variante "alt": les moments sont pris sous Φ_i (niveau noeud) et
v_i^j = a - (J_ij v_i^j + ε_j^i)² b est résolue comme une quadratique.

Avec V ≡ 0 la variante "lc" se réduit exactement à LCBP.
"""

from dataclasses import dataclass
import logging
import math
from typing import Optional, Tuple, Union

import numpy as np

from ..core import (
    CavityCovariance,
    MarginalSet,
    MessageKernel,
    MessageSet,
    RunReport,
    Schedule,
    edge_index,
    init_messages,
    iterate,
)
from ..cavity.estimation import resolve_cavity_covariance
from ..errors import NegativeCavityPrecision, QuadraticSolveDegenerate, UsageError
from ..model import PerturbedModel
from .moment_matching import TiltedMoments, moment_match_1d

logger = logging.getLogger(__name__)

VARIANTS = ("lc", "alt")


@dataclass
class LcEpState:
    """
    État LC-EP.

    Attributes:
        messages: messages (m_i^j, v_i^j)
        hat_edge_m, hat_edge_v: (m̂_i^j, v̂_i^j) par arête orientée (NaN si invalide)
        hat_node_m, hat_node_v: (m̂_i, v̂_i) par noeud
        A: covariances cavité (entrée, non modifiée)
    """

    messages: MessageSet
    hat_edge_m: np.ndarray
    hat_edge_v: np.ndarray
    hat_node_m: np.ndarray
    hat_node_v: np.ndarray
    A: Optional[CavityCovariance] = None

    def copy(self) -> "LcEpState":
        return LcEpState(self.messages.copy(), self.hat_edge_m.copy(), self.hat_edge_v.copy(),
                         self.hat_node_m.copy(), self.hat_node_v.copy(), self.A)


@dataclass
class LcEpResult:
    state: LcEpState
    marginals: MarginalSet
    report: RunReport
    variant: str


class _LcEpKernel:
    """Mises à jour LC-EP au-dessus du noyau de messages."""

    def __init__(self, model: PerturbedModel, A: Optional[CavityCovariance]):
        index = edge_index(model.base)
        self.kernel = MessageKernel(index, A.kernel_blocks(index) if A is not None else None)
        self.index = index
        self.potentials = model.potential_list()
        self.A = A

    def refresh_hats(self, state: LcEpState):
        m, v = state.messages.m, state.messages.v
        for e in range(len(self.index)):
            hat = self.kernel.hatted(m, v, e)
            state.hat_edge_m[e], state.hat_edge_v[e] = hat if hat is not None else (np.nan, np.nan)
        for p in range(len(self.index.ids)):
            hat = self.kernel.node_hatted(m, v, p)
            state.hat_node_m[p], state.hat_node_v[p] = hat if hat is not None else (np.nan, np.nan)

    def edge_tilt(self, m, v, e) -> TiltedMoments:
        hat = self.kernel.hatted(m, v, e)
        if hat is None:
            i, j = self.index.pairs[e]
            raise NegativeCavityPrecision(f"non-positive cavity precision on edge {i} -> {j}")
        return moment_match_1d(hat[0], hat[1], self.potentials[self.index.src[e]])

    def node_tilt(self, m, v, p) -> TiltedMoments:
        hat = self.kernel.node_hatted(m, v, p)
        if hat is None:
            raise NegativeCavityPrecision(f"non-positive precision at node {self.index.ids[p]}")
        return moment_match_1d(hat[0], hat[1], self.potentials[p])

    def lc_update(self, m, v, e) -> Tuple[float, float]:
        a = self.edge_tilt(m, v, e)
        eps = self.kernel.eps[e]
        if eps == 0.0:
            return a.mean, a.variance
        b = self.edge_tilt(m, v, self.index.reverse[e])
        return a.mean - eps * b.mean, a.variance - eps * eps * b.variance

    def alt_update(self, m, v, e) -> Tuple[float, float]:
        a = self.node_tilt(m, v, self.index.src[e])
        b = self.node_tilt(m, v, self.index.dst[e])
        J = self.index.coupling[e]
        eps = self.kernel.eps[e]
        v_new = solve_alt_variance(a.variance, b.variance, J, eps)
        if v_new is None:
            i, j = self.index.pairs[e]
            raise QuadraticSolveDegenerate(f"no positive root for the variance of message {i} -> {j}")
        return a.mean - (J * v_new + eps) * b.mean, v_new

    def sweep(self, state: LcEpState, schedule: Schedule, rng, variant: str) -> Tuple[float, int]:
        m, v = state.messages.m, state.messages.v
        update = self.lc_update if variant == "lc" else self.alt_update
        residual, skipped = 0.0, 0
        for e in schedule.sweep_order(len(self.index), rng):
            try:
                new = update(m, v, e)
            except (NegativeCavityPrecision, QuadraticSolveDegenerate):
                if schedule.strict:
                    raise
                skipped += 1
                continue
            new_m = schedule.mix(new[0], m[e])
            new_v = schedule.mix(new[1], v[e])
            residual = max(residual, abs(new_m - m[e]), abs(new_v - v[e]))
            m[e], v[e] = new_m, new_v
        self.refresh_hats(state)
        return residual, skipped

    def marginals(self, state: LcEpState) -> MarginalSet:
        n = len(self.index.ids)
        means, variances = np.full(n, np.nan), np.full(n, np.nan)
        for p in range(n):
            try:
                tilt = self.node_tilt(state.messages.m, state.messages.v, p)
            except NegativeCavityPrecision:
                logger.warning(f"⚠️ Non-positive marginal precision at node {self.index.ids[p]}")
                continue
            means[p], variances[p] = tilt.mean, tilt.variance
        return MarginalSet(self.index.ids, means, variances)


def solve_alt_variance(a: float, b: float, J: float, eps: float) -> Optional[float]:
    """
    Racine positive de v = a - (J v + ε)² b, continue avec la solution V ≡ 0.

    b J² v² + (2bJε + 1) v + (bε² - a) = 0; la racine "+" est évaluée sous
    une forme sans annulation. Renvoie None si aucune racine réelle positive.
    """
    qa = b * J * J
    qb = 2.0 * b * J * eps + 1.0
    qc = b * eps * eps - a
    disc = qb * qb - 4.0 * qa * qc
    if disc < 0.0:
        return None
    root = math.sqrt(disc)
    if qb >= 0.0:
        den = qb + root
        if den == 0.0:
            return None
        v = -2.0 * qc / den
    else:
        if qa == 0.0:
            return None
        v = (-qb + root) / (2.0 * qa)
    return v if v > 0.0 and math.isfinite(v) else None


def init_lc_ep_state(model: PerturbedModel, A: Optional[CavityCovariance] = None) -> LcEpState:
    """Messages (μ_i, s_i) et paramètres chapeautés associés."""
    messages = init_messages(model.base)
    n_edges, n = len(messages.m), model.base.n
    state = LcEpState(messages, np.empty(n_edges), np.empty(n_edges), np.empty(n), np.empty(n), A)
    _LcEpKernel(model, A).refresh_hats(state)
    return state


def lc_ep_step(model: PerturbedModel, state: LcEpState, schedule: Schedule,
               rng=None) -> Tuple[LcEpState, float, int]:
    """Un balayage LC-EP sur une copie de l'état."""
    kernel = _LcEpKernel(model, state.A)
    new = state.copy()
    residual, skipped = kernel.sweep(new, schedule, rng if rng is not None else schedule.rng(), "lc")
    return new, residual, skipped


def alt_lc_ep_step(model: PerturbedModel, state: LcEpState, schedule: Schedule,
                   rng=None) -> Tuple[LcEpState, float, int]:
    """Un balayage du formalisme alternatif sur une copie de l'état."""
    kernel = _LcEpKernel(model, state.A)
    new = state.copy()
    residual, skipped = kernel.sweep(new, schedule, rng if rng is not None else schedule.rng(), "alt")
    return new, residual, skipped


def run_lc_ep(model: PerturbedModel, A: Union[CavityCovariance, str, None] = None,
              schedule: Optional[Schedule] = None, variant: str = "lc", jobs: int = 1) -> LcEpResult:
    """
    Itère LC-EP ("lc") ou le formalisme alternatif ("alt") jusqu'à convergence.

    Args:
        model (PerturbedModel): modèle perturbé
        A: covariances cavité, source ("response", "exact-oracle", "file:...")
            résolue sur le modèle de base, ou None pour A = 0
        schedule (Schedule): paramètres d'itération
        variant (str): "lc" ou "alt"
        jobs (int): processus pour la propagation de réponse

    Returns:
        LcEpResult: état final, marginales (moments sous Φ_i) et rapport
    """
    if variant not in VARIANTS:
        raise UsageError(f"unknown LC-EP variant {variant!r}")
    schedule = schedule or Schedule()
    if isinstance(A, str):
        A = resolve_cavity_covariance(model.base, A, schedule, jobs)
    kernel = _LcEpKernel(model, A)
    state = init_lc_ep_state(model, A)

    def step(st, rng):
        residual, skipped = kernel.sweep(st, schedule, rng, variant)
        return st, residual, skipped

    state, report = iterate(step, state, schedule, f"ep_{variant}")
    return LcEpResult(state, kernel.marginals(state), report, variant)
