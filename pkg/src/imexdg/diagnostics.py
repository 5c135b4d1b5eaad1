"""Error norms, convergence orders, Courant numbers and balance residuals.

Field sampling evaluates the DG polynomial of the containing element at
each sample point (conserved variables first, derived quantities from the
sampled values), so sampled data is exact for polynomial states.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .basis import TensorBasis
from .mesh import ChannelMesh, min_diameter
from .scenarios import BaldaufParams, background_pressure
from .thermo import EN, MX, MY, MZ, RHO, ConservedField, GasConstants

SAMPLE_TAGS = ("w", "u", "v", "Tp", "pp", "rho", "p")


@dataclass(frozen=True)
class SampleGrid:
    """Uniform cell-centered sample points covering the domain."""

    nx: int
    nz: int
    Lx: float
    Lz: float

    def __post_init__(self):
        if self.nx < 1 or self.nz < 1:
            raise ValueError("sample counts must be >= 1")

    @property
    def x(self) -> np.ndarray:
        return (np.arange(self.nx) + 0.5) * (self.Lx / self.nx)

    @property
    def z(self) -> np.ndarray:
        return (np.arange(self.nz) + 0.5) * (self.Lz / self.nz)


def _locate(coords: np.ndarray, h: float, n: int):
    """Element index and reference coordinate of each sample ordinate."""
    idx = np.minimum((coords / h).astype(int), n - 1)
    ref = 2.0 * (coords - idx * h) / h - 1.0
    return idx, ref


def _sample_conserved(state: ConservedField, mesh: ChannelMesh,
                      basis: TensorBasis, grid: SampleGrid) -> np.ndarray:
    """All five conserved fields at the grid points, shape (5, nz, nx)."""
    ex, xi = _locate(grid.x, mesh.hx, mesh.nx)
    ez, zeta = _locate(grid.z, mesh.hz, mesh.nz)
    lx = basis.eval_1d(xi)      # (gnx, n1)
    lz = basis.eval_1d(zeta)    # (gnz, n1)
    # gather element blocks per (gz, gx) pair and contract both node axes
    blocks = state.data[:, ez[:, None], ex[None, :], :, :]
    return np.einsum("vZXji,Zj,Xi->vZX", blocks, lz, lx, optimize=True)


def sample_field(state: ConservedField, tag: str, grid: SampleGrid,
                 mesh: ChannelMesh, basis: TensorBasis, gas: GasConstants,
                 background: BaldaufParams | None = None) -> np.ndarray:
    """Sample one derived quantity on the grid; shape (grid.nz, grid.nx).

    Primed tags (Tp, pp) subtract the analytic background and require
    ``background``. u is also the horizontal perturbation velocity since
    the scenarios start from rest.
    """
    if tag not in SAMPLE_TAGS:
        raise ValueError(f"unknown sample tag {tag!r}; one of {SAMPLE_TAGS}")
    q = _sample_conserved(state, mesh, basis, grid)
    rho = q[RHO]
    if tag == "rho":
        return rho
    if tag == "w":
        return q[MZ] / rho
    if tag == "u":
        return q[MX] / rho
    if tag == "v":
        return q[MY] / rho
    ke = 0.5 * (q[MX] ** 2 + q[MY] ** 2 + q[MZ] ** 2) / rho
    p = (gas.gamma - 1.0) * (q[EN] - ke)
    if tag == "p":
        return p
    if background is None:
        raise ValueError(f"tag {tag!r} needs the scenario background")
    p0 = background_pressure(background, gas, grid.z)[:, None]
    if tag == "pp":
        return p - p0
    return p / (rho * gas.R) - background.T0  # Tp


def error_norms(a: np.ndarray, b: np.ndarray) -> tuple[float, float]:
    """Discrete (l2, linf) distance: root mean square and max difference."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    diff = a - b
    return float(np.sqrt(np.mean(diff ** 2))), float(np.max(np.abs(diff)))


def eoc(errors: Sequence[float], resolutions: Sequence[float]) -> list[float]:
    """Pairwise experimental orders log(e2/e1)/log(h2/h1)."""
    if len(errors) < 2 or len(errors) != len(resolutions):
        raise ValueError("need matching sequences of >= 2 entries")
    r = np.asarray(resolutions, dtype=float)
    if np.any(np.diff(r) >= 0.0):
        raise ValueError("resolutions must be strictly decreasing")
    e = np.asarray(errors, dtype=float)
    return [float(np.log(e[i + 1] / e[i]) / np.log(r[i + 1] / r[i]))
            for i in range(len(e) - 1)]


def courant_numbers(state: ConservedField, mesh: ChannelMesh,
                    basis: TensorBasis, gas: GasConstants, dt: float,
                    u_ref: float) -> tuple[float, float]:
    """Acoustic and advective Courant numbers r * speed * dt * sqrt(d) / H.

    The sound speed is the nodal maximum; the advective reference speed is
    caller-supplied (the flow starts at rest).
    """
    if u_ref <= 0.0:
        raise ValueError("u_ref must be positive")
    rho = state.rho
    ke = 0.5 * np.sum(state.momentum ** 2, axis=0) / rho
    p = (gas.gamma - 1.0) * (state.rhoE - ke)
    c = float(np.max(np.sqrt(gas.gamma * p / rho)))
    scale = basis.degree * dt * np.sqrt(2.0) / min_diameter(mesh)
    return c * scale, u_ref * scale


def geostrophic_error(state: ConservedField, mesh: ChannelMesh,
                      basis: TensorBasis, gas: GasConstants,
                      samples_per_element: int = 4) -> float:
    """Domain-averaged | (dp/dx) / rho - f v |, midpoint rule.

    dp/dx is the exact x-derivative of the elementwise pressure polynomial
    (the polynomial interpolating the nodal pressures), evaluated on a
    uniform sample grid; the average over midpoint cells equals the
    normalized integral.
    """
    n1 = basis.n_nodes
    s = samples_per_element
    xi = -1.0 + (2.0 * np.arange(s) + 1.0) / s      # reference midpoints
    lx = basis.eval_1d(xi)                          # (s, n1)
    dlx = basis.eval_deriv_1d(xi) * (2.0 / mesh.hx)
    lz = lx

    rho = state.rho
    ke = 0.5 * np.sum(state.momentum ** 2, axis=0) / rho
    p = (gas.gamma - 1.0) * (state.rhoE - ke)

    dpdx = np.einsum("ZXji,sj,ti->ZXst", p, lz, dlx, optimize=True)
    rho_s = np.einsum("ZXji,sj,ti->ZXst", rho, lz, lx, optimize=True)
    mv_s = np.einsum("ZXji,sj,ti->ZXst", state.data[MY], lz, lx,
                     optimize=True)
    resid = np.abs(dpdx / rho_s - gas.f * mv_s / rho_s)
    return float(np.mean(resid))


def conservation_totals(state: ConservedField, W: np.ndarray
                        ) -> tuple[float, float]:
    """Quadrature-weighted totals of mass and energy."""
    return float(np.sum(W * state.rho)), float(np.sum(W * state.rhoE))
