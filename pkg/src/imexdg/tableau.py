"""TR-BDF2 additive Runge-Kutta tableau pair.

Second order, three stages. The implicit part is the L-stable, stiffly
accurate TR-BDF2 ESDIRK scheme; the explicit companion shares the nodes c
and the weights b (which preserves linear invariants), with the remaining
free coefficient fixed to a32 = 1/2 for monotonicity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ButcherPair:
    """Explicit/implicit tableaux with shared weights b and nodes c."""

    chi: float
    a_ex: np.ndarray   # strictly lower triangular
    a_im: np.ndarray   # lower triangular, ESDIRK diagonal
    b: np.ndarray
    c: np.ndarray

    @property
    def n_stages(self) -> int:
        return len(self.b)

    def explicit_row(self, stage: int) -> tuple[float, ...]:
        """Weights a_{l,m} for m < l (1-based stage index)."""
        return tuple(self.a_ex[stage - 1, :stage - 1])

    def implicit_row(self, stage: int) -> tuple[float, ...]:
        return tuple(self.a_im[stage - 1, :stage - 1])

    def implicit_diag(self, stage: int) -> float:
        return float(self.a_im[stage - 1, stage - 1])


def tableau() -> ButcherPair:
    chi = 2.0 - math.sqrt(2.0)
    a32 = 0.5
    a_ex = np.array([
        [0.0, 0.0, 0.0],
        [chi, 0.0, 0.0],
        [1.0 - a32, a32, 0.0],
    ])
    a_im = np.array([
        [0.0, 0.0, 0.0],
        [chi / 2.0, chi / 2.0, 0.0],
        [0.5 - chi / 4.0, 0.5 - chi / 4.0, chi / 2.0],
    ])
    b = np.array([0.5 - chi / 4.0, 0.5 - chi / 4.0, chi / 2.0])
    c = np.array([0.0, chi, 1.0])
    return ButcherPair(chi=chi, a_ex=a_ex, a_im=a_im, b=b, c=c)
