"""
Propagation d'espérance pour les modèles perturbés: EP à gaussienne
complète, EP à boucles corrigées et formalisme alternatif.
"""

from .full_ep import EPResult, SiteApproximation, full_gaussian_ep
from .lc_ep import (
    LcEpResult,
    LcEpState,
    alt_lc_ep_step,
    init_lc_ep_state,
    lc_ep_step,
    run_lc_ep,
    solve_alt_variance,
)
from .moment_matching import TiltedMoments, moment_match_1d

__all__ = [
    "EPResult",
    "LcEpResult",
    "LcEpState",
    "SiteApproximation",
    "TiltedMoments",
    "alt_lc_ep_step",
    "full_gaussian_ep",
    "init_lc_ep_state",
    "lc_ep_step",
    "moment_match_1d",
    "run_lc_ep",
    "solve_alt_variance",
]
