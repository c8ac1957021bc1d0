"""Containers shared by the high-order and heterogeneous network analyses."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["CompactSystem", "Verdict", "CONTROLLABLE", "UNCONTROLLABLE", "INCONCLUSIVE"]

CONTROLLABLE = "Controllable"
UNCONTROLLABLE = "Uncontrollable"
INCONCLUSIVE = "Inconclusive"


@dataclass
class CompactSystem:
    """Stacked closed-loop pair of a whole network.

    ``layout[r]`` is the 1-based ``(agent, coordinate)`` pair that state row
    ``r`` belongs to; for high-order networks the coordinate is the order.
    """

    Amat: np.ndarray
    Bmat: np.ndarray
    layout: list
    meta: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return self.Amat.shape[0]

    def pair(self):
        return self.Amat, self.Bmat


@dataclass
class Verdict:
    """Three-valued outcome of a controllability decision.

    A witness accompanies ``Controllable`` and a certificate accompanies
    ``Uncontrollable``; ``Inconclusive`` carries neither.
    """

    status: str
    witness: dict | None = None
    certificate: dict | None = None
    trials_used: int = 0
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in (CONTROLLABLE, UNCONTROLLABLE, INCONCLUSIVE):
            raise ValueError(f"unknown status {self.status!r}")
        if (self.witness is not None) != (self.status == CONTROLLABLE):
            raise ValueError("witness must be present exactly when Controllable")
        if (self.certificate is not None) != (self.status == UNCONTROLLABLE):
            raise ValueError("certificate must be present exactly when Uncontrollable")

    @property
    def controllable(self) -> bool:
        return self.status == CONTROLLABLE

    def to_json(self) -> dict:
        return {"status": self.status, "witness": self.witness,
                "certificate": self.certificate, "trials_used": self.trials_used,
                "diagnostics": self.diagnostics}
