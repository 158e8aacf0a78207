"""
Seeded model generators for the command line and the benchmark.

All families are deterministic for a fixed seed: the same arguments
always produce byte-identical model files.
"""

import logging
import math
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..errors import UsageError
from ..model import Edge, GaussianModel, NonlinearPotential, Node, PerturbedModel

logger = logging.getLogger(__name__)

KINDS = ("chain", "cycle", "grid", "random_dominant", "tree")


def _uniform_edges(pairs: List[Tuple[int, int]], coupling: float) -> List[Edge]:
    return [Edge(i, j, coupling) for i, j in pairs]


def _random_couplings(pairs: List[Tuple[int, int]], coupling: float,
                      rng: np.random.Generator) -> List[Edge]:
    edges = []
    for i, j in pairs:
        J = 0.0
        while J == 0.0:
            J = float(rng.uniform(-coupling, coupling))
        edges.append(Edge(i, j, J))
    return edges


def _dominant_nodes(n: int, edges: List[Edge], rng: np.random.Generator) -> List[Node]:
    """Random means in [-1, 1] and 1/s_i = Σ_j |J_ij| + 1."""
    weight = np.zeros(n)
    for e in edges:
        weight[e.i] += abs(e.J)
        weight[e.j] += abs(e.J)
    mu = rng.uniform(-1.0, 1.0, size=n)
    return [Node(p, float(mu[p]), float(1.0 / (weight[p] + 1.0))) for p in range(n)]


def _grid_pairs(side: int) -> List[Tuple[int, int]]:
    pairs = []
    for r in range(side):
        for c in range(side):
            p = r * side + c
            if c + 1 < side:
                pairs.append((p, p + 1))
            if r + 1 < side:
                pairs.append((p, p + side))
    return pairs


def generate_model(kind: str, n: int, coupling: float, seed: int = 0) -> GaussianModel:
    """
    Generate a model of the given family.

    Args:
        kind (str): chain, cycle, grid, random_dominant or tree
        n (int): Number of nodes (side length for grid)
        coupling (float): Uniform coupling (chain, cycle, grid) or half-width
            of the coupling range (random_dominant, tree)
        seed (int): Seed of the random families

    Returns:
        GaussianModel: A positive definite model

    Raises:
        UsageError: If the kind or size is invalid, or if the uniform
            families come out not positive definite
    """
    if kind not in KINDS:
        raise UsageError(f"unknown model kind {kind!r}; expected one of {', '.join(KINDS)}")
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise UsageError(f"n must be an integer >= 1, got {n!r}")
    if not (math.isfinite(coupling) and coupling > 0):
        raise UsageError(f"coupling must be finite and > 0, got {coupling}")
    n = int(n)
    rng = np.random.default_rng(seed)

    if kind == "chain":
        nodes = [Node(p, 1.0, 1.0) for p in range(n)]
        edges = _uniform_edges([(p, p + 1) for p in range(n - 1)], coupling)
    elif kind == "cycle":
        if n < 3:
            raise UsageError(f"a cycle needs at least 3 nodes, got {n}")
        nodes = [Node(p, 1.0, 1.0) for p in range(n)]
        edges = _uniform_edges([(p, (p + 1) % n) for p in range(n)], coupling)
    elif kind == "grid":
        nodes = [Node(p, 1.0, 1.0) for p in range(n * n)]
        edges = _uniform_edges(_grid_pairs(n), coupling)
    elif kind == "tree":
        pairs = [(int(rng.integers(0, p)), p) for p in range(1, n)]
        edges = _random_couplings(pairs, coupling, rng)
        nodes = _dominant_nodes(n, edges, rng)
    else:
        p_edge = min(1.0, 3.0 / (n - 1)) if n > 1 else 0.0
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p_edge]
        edges = _random_couplings(pairs, coupling, rng)
        nodes = _dominant_nodes(n, edges, rng)

    model = GaussianModel(tuple(nodes), tuple(edges))
    if not model.validate().spd:
        raise UsageError(f"{kind} with n={n} and coupling={coupling} is not positive definite")
    logger.info(f"🧪 Generated {kind} model: {model.n} nodes, {len(model.edges)} edges (seed {seed})")
    return model


def parse_potential(text: Optional[str]) -> NonlinearPotential:
    """
    Parse a potential specification.

    Accepted forms: ``none``, ``quartic:<lambda>``, ``double_well:<a>,<b>``.
    """
    if text is None or text.strip() in ("", "none"):
        return NonlinearPotential.none()
    kind, _, params = text.strip().partition(":")
    try:
        values = [float(v) for v in params.split(",")] if params else []
    except ValueError as e:
        raise UsageError(f"invalid potential parameters in {text!r}: {e}") from e
    if kind == "quartic" and len(values) == 1:
        return NonlinearPotential.quartic(values[0])
    if kind == "double_well" and len(values) == 2:
        return NonlinearPotential.double_well(values[0], values[1])
    raise UsageError(f"invalid potential {text!r}; expected quartic:<lambda> or double_well:<a>,<b>")


def with_potential(model: GaussianModel, potential: NonlinearPotential) -> PerturbedModel:
    """The same potential on every node (no potential if it is none)."""
    potentials: Dict[int, NonlinearPotential] = {}
    if not potential.is_none:
        potentials = {i: potential for i in model.ids}
    return PerturbedModel(model, potentials)
