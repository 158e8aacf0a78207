"""
Appariement de moments 1D par quadrature de Gauss-Hermite.

Moments de la densité inclinée exp[-(x - c)²/(2v) - V(x)] avec les noeuds
x = c + sqrt(2v)·t. L'ordre double (16, 32, ...) jusqu'à un changement
relatif < rtol, avec un plafond de 512.
"""

from dataclasses import dataclass
from functools import lru_cache
import logging
import math
from typing import Tuple

import numpy as np
from numpy.polynomial.hermite import hermgauss

from ..errors import NonPositiveCavityVariance, QuadratureNotConverged
from ..model import NonlinearPotential

logger = logging.getLogger(__name__)

FIRST_ORDER = 16
MAX_ORDER = 512
RTOL = 1e-10


@dataclass(frozen=True)
class TiltedMoments:
    """Z (relatif à la gaussienne cavité), moyenne et variance de la densité inclinée."""

    Z: float
    mean: float
    variance: float
    order: int = 0


@lru_cache(maxsize=16)
def _nodes(order: int) -> Tuple[np.ndarray, np.ndarray]:
    return hermgauss(order)


def _quadrature(c: float, var: float, potential: NonlinearPotential, order: int) -> TiltedMoments:
    t, w = _nodes(order)
    scale = math.sqrt(2.0 * var)
    d = scale * t
    v = potential(c + d)
    floor = float(v.min())
    weights = w * np.exp(-(v - floor))
    mass = float(weights.sum())
    if not mass > 0.0:
        raise QuadratureNotConverged(f"tilted mass vanished at order {order}")
    first = float(weights @ d) / mass
    second = float(weights @ (d * d)) / mass
    Z = mass / math.sqrt(math.pi) * math.exp(-floor)
    return TiltedMoments(Z, c + first, second - first * first, order)


def moment_match_1d(cavity_mean: float, cavity_var: float, potential: NonlinearPotential,
                    rtol: float = RTOL, max_order: int = MAX_ORDER) -> TiltedMoments:
    """
    Moments de q(x) ∝ N(x; cavity_mean, cavity_var)·exp(-V(x)).

    Args:
        cavity_mean (float): moyenne cavité
        cavity_var (float): variance cavité (> 0)
        potential (NonlinearPotential): potentiel V du noeud
        rtol (float): changement relatif accepté entre deux ordres
        max_order (int): ordre maximal

    Returns:
        TiltedMoments: Z, moyenne, variance et ordre retenu

    Raises:
        NonPositiveCavityVariance: si cavity_var ≤ 0
        QuadratureNotConverged: si l'ordre maximal ne suffit pas
    """
    if not (math.isfinite(cavity_var) and cavity_var > 0.0):
        raise NonPositiveCavityVariance(f"cavity variance must be > 0, got {cavity_var}")
    if potential.is_none:
        return TiltedMoments(1.0, float(cavity_mean), float(cavity_var), 0)

    sd = math.sqrt(cavity_var)
    previous = _quadrature(cavity_mean, cavity_var, potential, FIRST_ORDER)
    order = FIRST_ORDER
    while order < max_order:
        order *= 2
        current = _quadrature(cavity_mean, cavity_var, potential, order)
        if (abs(current.Z - previous.Z) <= rtol * abs(previous.Z)
                and abs(current.mean - previous.mean) <= rtol * max(abs(previous.mean), sd)
                and abs(current.variance - previous.variance) <= rtol * abs(previous.variance)):
            if not current.variance > 0.0:
                break
            return current
        previous = current
    raise QuadratureNotConverged(
        f"Gauss-Hermite moments did not settle below rtol={rtol} up to order {max_order} "
        f"(cavity mean {cavity_mean:.4g}, variance {cavity_var:.4g}, {potential.kind.value})"
    )
