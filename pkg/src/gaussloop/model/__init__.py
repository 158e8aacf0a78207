"""
Modèle gaussien à interactions par paires et potentiels non linéaires.
"""

from .gaussian_model import (
    Edge,
    GaussianModel,
    Node,
    PerturbedModel,
    ValidationReport,
    attach_node,
    build,
    precision_matrix,
    remove_node,
    validate,
)
from .io import dumps_model, load_model, loads_model, model_from_dict, model_to_dict, save_model
from .potentials import NonlinearPotential, PotentialKind

__all__ = [
    "Edge",
    "GaussianModel",
    "Node",
    "PerturbedModel",
    "ValidationReport",
    "NonlinearPotential",
    "PotentialKind",
    "attach_node",
    "build",
    "precision_matrix",
    "remove_node",
    "validate",
    "dumps_model",
    "loads_model",
    "load_model",
    "save_model",
    "model_from_dict",
    "model_to_dict",
]
