"""
Format de fichier canonique des modèles.

JSON: {"nodes": [{"id", "mu", "s"}...] triés par id,
"edges": [{"i", "j", "J"}...] triés par (i, j), "potentials" optionnel}.
Les flottants sont écrits avec la précision aller-retour de repr().
"""

import json
import logging
from pathlib import Path
from typing import Union

from ..errors import ModelError
from .gaussian_model import Edge, GaussianModel, Node, PerturbedModel
from .potentials import NonlinearPotential

logger = logging.getLogger(__name__)


def model_to_dict(model: Union[GaussianModel, PerturbedModel]) -> dict:
    base = model.base if isinstance(model, PerturbedModel) else model
    data = {
        "nodes": [{"id": n.id, "mu": n.mu, "s": n.s} for n in base.nodes],
        "edges": [{"i": e.i, "j": e.j, "J": e.J} for e in base.edges],
    }
    if isinstance(model, PerturbedModel):
        records = [p.to_dict(i) for i, p in model.potentials.items() if not p.is_none]
        if records:
            data["potentials"] = records
    return data


def model_from_dict(data: dict) -> PerturbedModel:
    """
    Reconstruit un modèle depuis sa forme JSON.

    Returns:
        PerturbedModel: modèle de base plus potentiels (éventuellement vides)
    """
    if not isinstance(data, dict) or "nodes" not in data:
        raise ModelError("model file must be a JSON object with a 'nodes' array")
    try:
        nodes = tuple(Node(r["id"], r["mu"], r["s"]) for r in data["nodes"])
        edges = tuple(Edge(r["i"], r["j"], r["J"]) for r in data.get("edges", []))
        base = GaussianModel(nodes, edges)
    except (KeyError, TypeError, ValueError) as e:
        raise ModelError(f"malformed node or edge record: {e}") from e

    potentials = {}
    try:
        for record in data.get("potentials", []):
            if "id" not in record:
                raise ModelError("potential record without 'id'")
            if record["id"] in potentials:
                raise ModelError(f"duplicate potential for node {record['id']}")
            potentials[record["id"]] = NonlinearPotential.from_dict(record)
        return PerturbedModel(base, potentials)
    except (KeyError, TypeError, ValueError) as e:
        raise ModelError(f"malformed potential record: {e}") from e


def dumps_model(model: Union[GaussianModel, PerturbedModel]) -> str:
    """Sérialisation déterministe (octet pour octet) d'un modèle."""
    return json.dumps(model_to_dict(model), indent=2, allow_nan=False) + "\n"


def loads_model(text: str) -> PerturbedModel:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelError(f"invalid JSON: {e}") from e
    return model_from_dict(data)


def save_model(model, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(dumps_model(model), encoding="utf-8")
    logger.info(f"💾 Model written to {path}")
    return path


def load_model(path: Union[str, Path]) -> PerturbedModel:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ModelError(f"cannot read model file {path}: {e}") from e
    model = loads_model(text)
    logger.info(f"📂 Loaded model {path} ({model.base.n} nodes, {len(model.base.edges)} edges)")
    return model
