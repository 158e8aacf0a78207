"""
Potentiels non linéaires à une variable.

Un potentiel V_i multiplie le facteur gaussien du noeud i par exp(-V_i(σ)).
Les formes supportées sont bornées inférieurement et croissent au moins
quadratiquement à l'infini (densités normalisables).
"""

from dataclasses import dataclass
from enum import Enum
import math

import numpy as np

from ..errors import ModelError


class PotentialKind(str, Enum):
    NONE = "none"
    QUARTIC = "quartic"
    DOUBLE_WELL = "double_well"


@dataclass(frozen=True)
class NonlinearPotential:
    """
    Potentiel V(σ) d'un noeud.

    - none: V = 0
    - quartic: V = λσ⁴ (λ ≥ 0)
    - double_well: V = a(σ² - b)² (a ≥ 0)
    """

    kind: PotentialKind = PotentialKind.NONE
    lam: float = 0.0
    a: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", PotentialKind(self.kind))
        for name in ("lam", "a", "b"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ModelError(f"potential parameter {name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.kind is PotentialKind.QUARTIC and self.lam < 0:
            raise ModelError(f"quartic potential needs lambda >= 0, got {self.lam}")
        if self.kind is PotentialKind.DOUBLE_WELL and self.a < 0:
            raise ModelError(f"double_well potential needs a >= 0, got {self.a}")

    @classmethod
    def none(cls) -> "NonlinearPotential":
        return cls()

    @classmethod
    def quartic(cls, lam: float) -> "NonlinearPotential":
        return cls(PotentialKind.QUARTIC, lam=lam)

    @classmethod
    def double_well(cls, a: float, b: float) -> "NonlinearPotential":
        return cls(PotentialKind.DOUBLE_WELL, a=a, b=b)

    @property
    def is_none(self) -> bool:
        """Vrai si V ≡ 0 (y compris λ = 0 ou a = 0)."""
        if self.kind is PotentialKind.QUARTIC:
            return self.lam == 0.0
        if self.kind is PotentialKind.DOUBLE_WELL:
            return self.a == 0.0
        return True

    @property
    def confining(self) -> bool:
        """Vrai si V domine toute forme quadratique à l'infini."""
        return not self.is_none

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind is PotentialKind.QUARTIC:
            return self.lam * x ** 4
        if self.kind is PotentialKind.DOUBLE_WELL:
            return self.a * (x * x - self.b) ** 2
        return np.zeros_like(x)

    def to_dict(self, node_id: int) -> dict:
        if self.kind is PotentialKind.QUARTIC:
            return {"id": node_id, "kind": self.kind.value, "lambda": self.lam}
        if self.kind is PotentialKind.DOUBLE_WELL:
            return {"id": node_id, "kind": self.kind.value, "a": self.a, "b": self.b}
        return {"id": node_id, "kind": self.kind.value}

    @classmethod
    def from_dict(cls, record: dict) -> "NonlinearPotential":
        try:
            kind = PotentialKind(record.get("kind", "none"))
        except ValueError as e:
            raise ModelError(f"unknown potential kind {record.get('kind')!r}") from e
        try:
            if kind is PotentialKind.QUARTIC:
                return cls.quartic(record["lambda"])
            if kind is PotentialKind.DOUBLE_WELL:
                return cls.double_well(record["a"], record["b"])
        except KeyError as e:
            raise ModelError(f"potential {kind.value} is missing field {e}") from e
        return cls.none()
