"""
Covariances à partir d'exécutions de BP: propagation de réponse,
correction de variance par graphe cavité et graphes croissants.
"""

from .estimation import (
    A_SOURCES,
    CavityRunCovariance,
    cavity_covariances_by_response,
    covariance_by_cavity_runs,
    resolve_cavity_covariance,
)
from .growing import GrowthResult, full_covariance_growing, node_order
from .response import ResponseState, response_propagation, response_state
from .variance import (
    CavityBPPair,
    CavityCorrection,
    cavity_bp_pair,
    covariance_entries,
    degenerate_threshold,
    kappa_u,
    lc_variance,
    lc_variance_via_cavity_bp,
    nearest_neighbor_moment,
    next_nearest_neighbor_moment,
)

__all__ = [
    "A_SOURCES",
    "CavityBPPair",
    "CavityCorrection",
    "CavityRunCovariance",
    "GrowthResult",
    "ResponseState",
    "cavity_bp_pair",
    "cavity_covariances_by_response",
    "covariance_by_cavity_runs",
    "covariance_entries",
    "degenerate_threshold",
    "full_covariance_growing",
    "kappa_u",
    "lc_variance",
    "lc_variance_via_cavity_bp",
    "nearest_neighbor_moment",
    "next_nearest_neighbor_moment",
    "node_order",
    "resolve_cavity_covariance",
    "response_propagation",
    "response_state",
]
