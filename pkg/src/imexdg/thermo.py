"""Conserved-variable storage and ideal-gas closures.

Conserved state per node: (rho, rho*u, rho*v, rho*w, rho*E) with
E = e + |u|^2/2 and p = (gamma - 1)*rho*e. The slice is two-dimensional
(x-z) but keeps all three velocity components; v is advected and rotated
without a y-derivative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import DofLayout

# component indices into ConservedField.data
RHO, MX, MY, MZ, EN = 0, 1, 2, 3, 4


class InvalidStateError(ValueError):
    """Raised when a state violates positivity; carries the dof location."""

    def __init__(self, message: str, where: tuple | None = None):
        super().__init__(message + ("" if where is None else f" at dof {where}"))
        self.where = where


@dataclass(frozen=True)
class GasConstants:
    """Calorically perfect ideal gas plus body-force parameters.

    gamma: ratio of specific heats; R: specific gas constant [J/(kg K)];
    g: gravitational acceleration [m/s^2]; f: Coriolis parameter [1/s].
    """

    gamma: float = 1.4
    R: float = 287.0
    g: float = 9.81
    f: float = 0.0

    def __post_init__(self):
        if self.gamma <= 1.0 or self.R <= 0.0:
            raise ValueError("require gamma > 1 and R > 0")

    @property
    def cp(self) -> float:
        return self.gamma * self.R / (self.gamma - 1.0)

    @property
    def cv(self) -> float:
        return self.R / (self.gamma - 1.0)


@dataclass(frozen=True)
class PrimitiveSample:
    """Primitive/derived quantities at one or many nodes (array-valued)."""

    rho: np.ndarray
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    p: np.ndarray
    T: np.ndarray
    e: np.ndarray
    h: np.ndarray
    k: np.ndarray
    c: np.ndarray


@dataclass
class ConservedField:
    """Nodal coefficients of the five conserved variables.

    ``data`` has shape (5, nz, nx, n1, n1); see :class:`~imexdg.basis.DofLayout`
    for the flat ordering. Mutation is owned by the time stepper; everything
    else treats instances as read-only.
    """

    data: np.ndarray
    layout: DofLayout

    def __post_init__(self):
        expected = (5,) + self.layout.grid_shape()
        if self.data.shape != expected:
            raise ValueError(f"field shape {self.data.shape} != {expected}")

    @classmethod
    def zeros(cls, layout: DofLayout) -> "ConservedField":
        return cls(np.zeros((5,) + layout.grid_shape()), layout)

    def copy(self) -> "ConservedField":
        return ConservedField(self.data.copy(), self.layout)

    @property
    def rho(self) -> np.ndarray:
        return self.data[RHO]

    @property
    def momentum(self) -> np.ndarray:
        return self.data[MX:MZ + 1]

    @property
    def rhoE(self) -> np.ndarray:
        return self.data[EN]

    def velocity(self) -> np.ndarray:
        return self.momentum / self.rho

    def validate(self) -> None:
        """Check positivity of density and internal energy; raise with the
        offending dof location otherwise (no limiting is applied)."""
        rho = self.rho
        if np.any(rho <= 0.0) or not np.all(np.isfinite(rho)):
            bad = np.unravel_index(int(np.nanargmin(rho)), rho.shape)
            raise InvalidStateError(f"non-positive density {rho[bad]:.6e}", bad)
        rho_e = self.rhoE - 0.5 * np.sum(self.momentum ** 2, axis=0) / rho
        if np.any(rho_e <= 0.0) or not np.all(np.isfinite(rho_e)):
            bad = np.unravel_index(int(np.nanargmin(rho_e)), rho_e.shape)
            raise InvalidStateError(
                f"non-positive internal energy {rho_e[bad]:.6e}", bad)


def primitives_from_conserved(q, gas: GasConstants) -> PrimitiveSample:
    """Closure (rho, m, rhoE) -> all primitive quantities.

    ``q`` is a 5-sequence of scalars or arrays (rho, mx, my, mz, rhoE).
    """
    rho = np.asarray(q[0], dtype=float)
    if np.any(rho <= 0.0):
        where = None
        if rho.ndim:
            where = np.unravel_index(int(np.argmin(rho)), rho.shape)
        raise InvalidStateError("non-positive density", where)
    u = np.asarray(q[1], dtype=float) / rho
    v = np.asarray(q[2], dtype=float) / rho
    w = np.asarray(q[3], dtype=float) / rho
    k = 0.5 * (u * u + v * v + w * w)
    e = np.asarray(q[4], dtype=float) / rho - k
    if np.any(e <= 0.0):
        where = None
        if np.asarray(e).ndim:
            where = np.unravel_index(int(np.argmin(e)), np.asarray(e).shape)
        raise InvalidStateError("non-positive internal energy", where)
    p = (gas.gamma - 1.0) * rho * e
    T = p / (rho * gas.R)
    h = e + p / rho
    c = np.sqrt(gas.gamma * p / rho)
    return PrimitiveSample(rho=rho, u=u, v=v, w=w, p=p, T=T, e=e, h=h, k=k, c=c)


def conserved_from_primitive(rho, u, v, w, p, gas: GasConstants):
    """Inverse closure; returns the conserved 5-tuple (arrays broadcast)."""
    rho = np.asarray(rho, dtype=float)
    p = np.asarray(p, dtype=float)
    if np.any(rho <= 0.0) or np.any(p <= 0.0):
        raise InvalidStateError("require rho > 0 and p > 0")
    u, v, w = (np.asarray(a, dtype=float) for a in (u, v, w))
    k = 0.5 * (u * u + v * v + w * w)
    rhoE = p / (gas.gamma - 1.0) + rho * k
    return rho, rho * u, rho * v, rho * w, rhoE


def pressure(state: ConservedField, gas: GasConstants) -> np.ndarray:
    """Nodal pressure field from a conserved state."""
    rho = state.rho
    ke = 0.5 * np.sum(state.momentum ** 2, axis=0) / rho
    return (gas.gamma - 1.0) * (state.rhoE - ke)
