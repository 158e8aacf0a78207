"""
Oracles exacts: factorisation dense pour les modèles gaussiens et
quadrature sur grille pour les modèles perturbés de petite dimension.
"""

from .exact import (
    ExactSolution,
    exact_cavity,
    exact_cavity_covariances,
    exact_gaussian,
    factorize,
    is_positive_definite,
)
from .grid_quadrature import PerturbedSolution, exact_perturbed

__all__ = [
    "ExactSolution",
    "PerturbedSolution",
    "exact_cavity",
    "exact_cavity_covariances",
    "exact_gaussian",
    "exact_perturbed",
    "factorize",
    "is_positive_definite",
]
