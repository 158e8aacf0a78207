"""
Oracle par quadrature sur grille pour les modèles perturbés de petite dimension.

Règle des trapèzes sur une grille tensorielle uniforme couvrant
[c_i - 10σ̂_i, c_i + 10σ̂_i] par axe, où (c, σ̂) viennent de la solution
gaussienne du modèle de base. La grille est raffinée (17, 33, 65, ...
points par axe) jusqu'à ce que deux estimations successives des moments
diffèrent de moins de rtol en relatif.
"""

from dataclasses import dataclass
import logging
from typing import Optional, Tuple

import numpy as np

from ..errors import (
    DimensionTooLarge,
    NonIntegrable,
    NotPositiveDefinite,
    OracleInapplicable,
    QuadratureNotConverged,
)
from ..model import PerturbedModel
from .exact import ExactSolution, exact_gaussian

logger = logging.getLogger(__name__)

WINDOW = 10.0
FIRST_POINTS = 17
DEFAULT_MAX_POINTS = 40_000_000


@dataclass(frozen=True)
class PerturbedSolution(ExactSolution):
    """Moments exacts (à la tolérance près) d'un modèle perturbé."""

    points_per_axis: int = 0
    gaussian: Optional[ExactSolution] = None


def _moments(lam, c, sd, potentials, points) -> Tuple[float, np.ndarray, np.ndarray]:
    """Moments centrés en c: (masse, Σ p·y, Σ p·y yᵀ) avec y = x - c."""
    d = len(c)
    t = np.linspace(-WINDOW, WINDOW, points)
    axes = [sd[k] * t for k in range(d)]
    weights = []
    vterms = []
    for k in range(d):
        w = np.full(points, sd[k] * (t[1] - t[0]))
        w[0] *= 0.5
        w[-1] *= 0.5
        weights.append(w)
        v = potentials[k](c[k] + axes[k])
        # décalage par le minimum sur l'axe, la densité reste dans [0, 1]
        vterms.append(v - v.min())

    if d == 1:
        inner_y = np.zeros((1, 0))
        inner_w = np.ones(1)
        inner_v = np.zeros(1)
    else:
        grids = np.meshgrid(*axes[1:], indexing="ij")
        inner_y = np.stack([g.ravel() for g in grids], axis=1)
        inner_w = np.ones(inner_y.shape[0])
        inner_v = np.zeros(inner_y.shape[0])
        vgrids = np.meshgrid(*vterms[1:], indexing="ij")
        wgrids = np.meshgrid(*weights[1:], indexing="ij")
        for vg, wg in zip(vgrids, wgrids):
            inner_v += vg.ravel()
            inner_w *= wg.ravel()

    lam_inner = lam[1:, 1:]
    inner_quad = np.einsum("md,de,me->m", inner_y, lam_inner, inner_y)
    cross = inner_y @ lam[1:, 0]

    mass = 0.0
    first = np.zeros(d)
    second = np.zeros((d, d))
    y = np.empty((inner_y.shape[0], d))
    y[:, 1:] = inner_y
    for a in range(points):
        y0 = axes[0][a]
        quad = lam[0, 0] * y0 * y0 + 2.0 * y0 * cross + inner_quad
        p = np.exp(-0.5 * quad - vterms[0][a] - inner_v) * inner_w * weights[0][a]
        y[:, 0] = y0
        mass += p.sum()
        first += p @ y
        second += (y * p[:, None]).T @ y
    return mass, first, second


def exact_perturbed(model: PerturbedModel, max_dim: int = 4, rtol: float = 1e-8,
                    max_points: int = DEFAULT_MAX_POINTS) -> PerturbedSolution:
    """
    Moments d'un modèle perturbé par quadrature sur grille.

    Args:
        model (PerturbedModel): modèle de base plus potentiels
        max_dim (int): nombre maximal de noeuds
        rtol (float): tolérance relative entre deux raffinements
        max_points (int): nombre total maximal de points de grille

    Returns:
        PerturbedSolution: moyennes, covariance et variances marginales

    Raises:
        DimensionTooLarge: si le modèle a plus de max_dim noeuds
        NonIntegrable: si la densité peut diverger
        QuadratureNotConverged: si la grille maximale ne suffit pas
    """
    base = model.base
    d = base.n
    if d > max_dim:
        raise DimensionTooLarge(f"grid oracle supports at most {max_dim} nodes, got {d}")
    try:
        gauss = exact_gaussian(base)
    except NotPositiveDefinite as e:
        if all(model.potential(i).confining for i in base.ids):
            raise OracleInapplicable(
                "base model is not positive definite; the integration window is undefined"
            ) from e
        raise NonIntegrable("base model is not positive definite and some node has no "
                            "confining potential") from e
    if d == 0:
        return PerturbedSolution((), np.zeros(0), np.zeros((0, 0)), 0, gauss)

    lam, _ = base.precision_matrix()
    c = gauss.means
    sd = np.sqrt(gauss.variances)
    potentials = model.potential_list()

    previous = None
    points = FIRST_POINTS
    while points ** d <= max_points:
        mass, first, second = _moments(lam, c, sd, potentials, points)
        if not np.isfinite(mass) or mass <= 0.0:
            raise NonIntegrable(f"density mass is {mass} on the integration grid")
        shift = first / mass
        means = c + shift
        cov = second / mass - np.outer(shift, shift)
        cov = 0.5 * (cov + cov.T)
        if previous is not None:
            dm = np.abs(means - previous[0]) <= rtol * np.maximum(np.abs(previous[0]), sd)
            scale = np.maximum(np.abs(previous[1]), np.outer(sd, sd))
            dc = np.abs(cov - previous[1]) <= rtol * scale
            if dm.all() and dc.all():
                logger.debug(f"✅ Grid quadrature converged at {points} points per axis (d={d})")
                return PerturbedSolution(base.ids, means, cov, points, gauss)
        previous = (means, cov)
        points = 2 * points - 1

    raise QuadratureNotConverged(
        f"grid quadrature did not reach rtol={rtol} within {max_points} points (d={d})"
    )
