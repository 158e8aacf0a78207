"""
Passage de messages gaussien: GaBP et LCBP.

Ce module contient l'ordonnancement, les structures de messages, le
noyau de mise à jour commun et les deux algorithmes.
"""

from .gabp import gabp_marginals, gabp_step, run_gabp
from .lcbp import (
    CavityAux,
    CavityCovariance,
    LocalMoments,
    compute_aux,
    lcbp_marginal_moments,
    lcbp_step,
    run_lcbp,
    update_d_residuals,
)
from .messages import BPRun, EdgeIndex, MarginalSet, MessageSet, edge_index, init_messages
from .schedule import Order, RunReport, Schedule, iterate
from .sweep import MessageKernel

__all__ = [
    "BPRun",
    "CavityAux",
    "CavityCovariance",
    "EdgeIndex",
    "LocalMoments",
    "MarginalSet",
    "MessageKernel",
    "MessageSet",
    "Order",
    "RunReport",
    "Schedule",
    "compute_aux",
    "edge_index",
    "gabp_marginals",
    "gabp_step",
    "init_messages",
    "iterate",
    "lcbp_marginal_moments",
    "lcbp_step",
    "run_gabp",
    "run_lcbp",
    "update_d_residuals",
]
