"""
Propagation de croyance gaussienne (GaBP) en paramétrisation (moyenne, variance).

Cas particulier A_i = 0 des équations à boucles corrigées:
v_i^j = s_i / (1 - s_i Σ_{k∈∂i\\j} J_ik² v_k^i),
m_i^j = v_i^j (μ_i/s_i + Σ_{k∈∂i\\j} J_ik m_k^i).
"""

import logging
from typing import Optional, Tuple

from ..model import GaussianModel
from .messages import BPRun, MarginalSet, MessageSet, edge_index, init_messages
from .schedule import Schedule, iterate
from .sweep import MessageKernel

logger = logging.getLogger(__name__)


def gabp_step(model: GaussianModel, messages: MessageSet, schedule: Schedule,
              rng=None) -> Tuple[MessageSet, float, int]:
    """
    Un balayage GaBP sur une copie des messages.

    Returns:
        tuple: (nouveaux messages, résidu, mises à jour ignorées)
    """
    kernel = MessageKernel(edge_index(model))
    new = messages.copy()
    residual, skipped = kernel.sweep(new, schedule, rng if rng is not None else schedule.rng())
    return new, residual, skipped


def gabp_marginals(model: GaussianModel, messages: MessageSet) -> MarginalSet:
    means, variances = MessageKernel(edge_index(model)).marginals(messages)
    return MarginalSet(model.ids, means, variances)


def run_gabp(model: GaussianModel, schedule: Optional[Schedule] = None,
             messages: Optional[MessageSet] = None) -> BPRun:
    """
    Itère GaBP jusqu'à résidu < tol ou max_iters.

    Args:
        model (GaussianModel): modèle à résoudre
        schedule (Schedule): paramètres d'itération (défauts si None)
        messages (MessageSet): messages initiaux (init_messages si None)

    Returns:
        BPRun: (messages, marginales, rapport); converged=False si la
        limite d'itérations est atteinte
    """
    schedule = schedule or Schedule()
    kernel = MessageKernel(edge_index(model))
    state = messages.copy() if messages is not None else init_messages(model)

    def step(msgs, rng):
        residual, skipped = kernel.sweep(msgs, schedule, rng)
        return msgs, residual, skipped

    state, report = iterate(step, state, schedule, "gabp")
    means, variances = kernel.marginals(state)
    return BPRun(state, MarginalSet(model.ids, means, variances), report)
