"""
Propagation d'espérance (EP) à gaussienne complète.

q(x) ∝ N_g(x)·Π_i f̄^i(x_i), avec des sites f̄^i gaussiens scalaires en
paramètres naturels (τ_i = 1/Σ^i, ν_i = m^i/Σ^i). Précision totale
Σ⁻¹ = Σ_g⁻¹ + diag(τ). Chaque mise à jour retire le site i (cavité),
apparie les moments de la densité inclinée puis divise par la cavité.

Dépendances:
    - ep.moment_matching: moments 1D par Gauss-Hermite
    - oracle.exact: factorisation de Cholesky
"""

from dataclasses import dataclass
import logging
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import cho_solve

from ..core import MarginalSet, RunReport, Schedule, iterate
from ..errors import CavityVarianceNegative, NotPositiveDefinite
from ..model import PerturbedModel
from ..oracle.exact import factorize, is_positive_definite
from .moment_matching import moment_match_1d

logger = logging.getLogger(__name__)

MAX_HALVINGS = 8


@dataclass
class SiteApproximation:
    """
    Sites EP en paramètres naturels et partie gaussienne globale.

    Attributes:
        ids: ids triés
        tau: précisions de site 1/Σ^i (peuvent être négatives)
        nu: m^i/Σ^i
        global_precision: Σ_g⁻¹ = Λ du modèle de base
        global_field: h du modèle de base
    """

    ids: Tuple[int, ...]
    tau: np.ndarray
    nu: np.ndarray
    global_precision: np.ndarray
    global_field: np.ndarray

    @property
    def site_variance(self) -> np.ndarray:
        """Σ^i (inf pour un site neutre)."""
        with np.errstate(divide="ignore"):
            return np.where(self.tau != 0.0, 1.0 / self.tau, np.inf)

    def posterior(self) -> Tuple[np.ndarray, np.ndarray]:
        """(m, Σ) recalculés depuis les sites: Σ⁻¹ = Σ_g⁻¹ + diag(τ), m = Σ(h + ν)."""
        n = len(self.ids)
        if n == 0:
            return np.zeros(0), np.zeros((0, 0))
        factor = factorize(self.global_precision + np.diag(self.tau))
        cov = cho_solve(factor, np.eye(n))
        cov = 0.5 * (cov + cov.T)
        return cho_solve(factor, self.global_field + self.nu), cov

    def records(self) -> list:
        return [
            {"id": i, "tau": float(t), "nu": float(v)}
            for i, t, v in zip(self.ids, self.tau, self.nu)
        ]


@dataclass
class EPResult:
    ids: Tuple[int, ...]
    means: np.ndarray
    covariance: np.ndarray
    sites: SiteApproximation
    report: RunReport

    @property
    def marginals(self) -> MarginalSet:
        return MarginalSet(self.ids, self.means.copy(), np.diag(self.covariance).copy())


class _GlobalGaussian:
    """Précision totale courante et son inverse, avec mises à jour de rang un."""

    def __init__(self, sites: SiteApproximation):
        self.sites = sites
        self.refresh()

    def refresh(self):
        self.means, self.cov = self.sites.posterior()

    def cavity_full(self, p: int) -> Tuple[float, float]:
        """Cavité par inversion complète de Σ_g⁻¹ + diag(τ sans i)."""
        tau = self.sites.tau.copy()
        nu = self.sites.nu.copy()
        tau[p] = 0.0
        nu[p] = 0.0
        factor = factorize(self.sites.global_precision + np.diag(tau))
        e = np.zeros(len(tau))
        e[p] = 1.0
        var = float(cho_solve(factor, e)[p])
        mean = float(cho_solve(factor, self.sites.global_field + nu)[p])
        return mean, var

    def cavity_fast(self, p: int) -> Tuple[float, float]:
        """Cavité depuis la marginale courante: 1/v_cav = 1/Σ_ii - τ_i."""
        sii = self.cov[p, p]
        prec = 1.0 / sii - self.sites.tau[p]
        if not prec > 0.0:
            return float("nan"), -1.0
        var = 1.0 / prec
        return var * (self.means[p] / sii - self.sites.nu[p]), var

    def accepts(self, p: int, new_tau: float, fast: bool) -> bool:
        """Vrai si la précision totale reste définie positive avec τ_p = new_tau."""
        delta = new_tau - self.sites.tau[p]
        if fast:
            return 1.0 + delta * self.cov[p, p] > 0.0
        tau = self.sites.tau.copy()
        tau[p] = new_tau
        return is_positive_definite(self.sites.global_precision + np.diag(tau))

    def set_site(self, p: int, tau: float, nu: float, fast: bool):
        delta = tau - self.sites.tau[p]
        self.sites.tau[p] = tau
        self.sites.nu[p] = nu
        if not fast:
            return
        col = self.cov[:, p].copy()
        self.cov -= (delta / (1.0 + delta * col[p])) * np.outer(col, col)
        self.means = self.cov @ (self.sites.global_field + self.sites.nu)


def full_gaussian_ep(model: PerturbedModel, schedule: Optional[Schedule] = None,
                     fast: bool = False) -> EPResult:
    """
    EP à gaussienne complète, sites mis à jour dans l'ordre des noeuds.

    Args:
        model (PerturbedModel): modèle de base SPD plus potentiels
        schedule (Schedule): tol porte sur le changement maximal de (τ, ν)
        fast (bool): cavité et Σ par mises à jour de rang un au lieu
            d'une inversion complète par site

    Returns:
        EPResult: moyennes, covariance, sites et rapport

    Raises:
        NotPositiveDefinite: si le modèle de base n'est pas SPD
    """
    schedule = schedule or Schedule()
    base = model.base
    lam, h = base.precision_matrix()
    n = base.n
    sites = SiteApproximation(base.ids, np.zeros(n), np.zeros(n), lam, h)
    potentials = model.potential_list()
    active = [p for p in range(n) if not potentials[p].is_none]

    algorithm = "ep_full_fast" if fast else "ep_full"

    def step(state, rng):
        residual, skipped = 0.0, 0
        for a in schedule.sweep_order(len(active), rng):
            p = active[a]
            mean_cav, var_cav = state.cavity_fast(p) if fast else state.cavity_full(p)
            if not var_cav > 0.0:
                if schedule.strict:
                    raise CavityVarianceNegative(f"cavity variance of node {base.ids[p]} is {var_cav}")
                skipped += 1
                continue
            tilted = moment_match_1d(mean_cav, var_cav, potentials[p])
            tau_old, nu_old = sites.tau[p], sites.nu[p]
            tau_new = schedule.mix(1.0 / tilted.variance - 1.0 / var_cav, tau_old)
            nu_new = schedule.mix(tilted.mean / tilted.variance - mean_cav / var_cav, nu_old)

            # demi-pas tant que la précision totale n'est pas définie positive
            fraction = 1.0
            for _ in range(MAX_HALVINGS + 1):
                tau_try = tau_old + fraction * (tau_new - tau_old)
                if state.accepts(p, tau_try, fast):
                    break
                fraction *= 0.5
            else:
                if schedule.strict:
                    raise NotPositiveDefinite(f"site update of node {base.ids[p]} breaks positivity")
                skipped += 1
                continue
            nu_try = nu_old + fraction * (nu_new - nu_old)
            residual = max(residual, abs(tau_try - tau_old), abs(nu_try - nu_old))
            state.set_site(p, tau_try, nu_try, fast)
        return state, residual, skipped

    state, report = iterate(step, _GlobalGaussian(sites), schedule, algorithm)
    state.refresh()
    return EPResult(base.ids, state.means, state.cov, sites, report)
