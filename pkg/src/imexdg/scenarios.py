"""Initial conditions for the inertia-gravity-wave channel benchmarks.

The background is a stationary, horizontally homogeneous, isothermal
hydrostatic atmosphere

    p0(z) = p_s exp(-delta z),  rho0(z) = rho_s exp(-delta z),
    delta = g / (R T0),         p_s = g rho_s / delta,

perturbed by a temperature anomaly specified through exponentially rescaled
(Bretherton-transformed) variables:

    T_b = dT exp(-(x - x_c)^2 / a^2) sin(pi z / H),
    T'  = exp(delta z / 2) T_b,   p' = 0,

with the density recombined from the ideal-gas law so the sampled state is
thermodynamically exact. The flow starts at rest; rotation enters through a
constant Coriolis parameter (f-plane at 45 degrees latitude).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .basis import DofLayout, TensorBasis
from .mesh import ChannelMesh
from .thermo import ConservedField, GasConstants, conserved_from_primitive

F_CORIOLIS_45 = 1.03126e-4


@dataclass(frozen=True)
class BaldaufParams:
    """Inertia-gravity-wave configuration (SI units throughout)."""

    Lx: float = 6.0e6
    Lz: float = 1.0e4
    T0: float = 250.0
    p_s: float = 1.0e5
    dT: float = 0.01
    a: float = 1.0e5
    x_c: float = 3.0e6
    H: float = 1.0e4
    f: float = F_CORIOLIS_45
    t_final: float = 28_800.0
    dt: float = 0.5
    nx: int = 300
    nz: int = 20
    degree: int = 4

    def __post_init__(self):
        if min(self.a, self.H, self.T0, self.p_s, self.Lx, self.Lz) <= 0:
            raise ValueError("scale parameters must be positive")

    def gas(self, gamma: float = 1.4, R: float = 287.0,
            g: float = 9.81) -> GasConstants:
        return GasConstants(gamma=gamma, R=R, g=g, f=self.f)

    def delta(self, gas: GasConstants) -> float:
        return gas.g / (gas.R * self.T0)

    def rho_s(self, gas: GasConstants) -> float:
        return self.p_s * self.delta(gas) / gas.g


def standard_baldauf_config() -> BaldaufParams:
    """The 6000 km x 10 km channel run: 300x20 elements of degree 4,
    dt = 0.5 s out to 8 h."""
    return BaldaufParams()


def planetary_config() -> BaldaufParams:
    """Planetary-scale variant: horizontal extents scaled tenfold,
    dt = 10 s out to 96 h; everything else unchanged."""
    return replace(standard_baldauf_config(),
                   Lx=6.0e7, a=1.0e6, x_c=3.0e7,
                   dt=10.0, t_final=345_600.0)


def node_coordinates(mesh: ChannelMesh, basis: TensorBasis
                     ) -> tuple[np.ndarray, np.ndarray]:
    """Physical (x, z) of every node, shaped (nz, nx, n1, n1)."""
    xi = 0.5 * (basis.nodes + 1.0)
    x1 = mesh.hx * (np.arange(mesh.nx)[:, None] + xi[None, :])  # (nx, n1)
    z1 = mesh.hz * (np.arange(mesh.nz)[:, None] + xi[None, :])  # (nz, n1)
    x = np.broadcast_to(x1[None, :, None, :],
                        (mesh.nz, mesh.nx, basis.n_nodes, basis.n_nodes))
    z = np.broadcast_to(z1[:, None, :, None],
                        (mesh.nz, mesh.nx, basis.n_nodes, basis.n_nodes))
    return np.ascontiguousarray(x), np.ascontiguousarray(z)


def background_pressure(params: BaldaufParams, gas: GasConstants, z):
    return params.p_s * np.exp(-params.delta(gas) * np.asarray(z))


def background_density(params: BaldaufParams, gas: GasConstants, z):
    return params.rho_s(gas) * np.exp(-params.delta(gas) * np.asarray(z))


def temperature_perturbation(params: BaldaufParams, gas: GasConstants, x, z):
    """T' = exp(delta z / 2) * T_b."""
    x, z = np.asarray(x), np.asarray(z)
    t_b = params.dT * np.exp(-((x - params.x_c) / params.a) ** 2) \
        * np.sin(np.pi * z / params.H)
    return np.exp(0.5 * params.delta(gas) * z) * t_b


def baldauf_initial_state(params: BaldaufParams, mesh: ChannelMesh,
                          basis: TensorBasis,
                          gas: GasConstants) -> ConservedField:
    """Nodal sampling of background + perturbation (no L2 projection)."""
    if abs(mesh.Lx - params.Lx) > 1e-9 * params.Lx \
            or abs(mesh.Lz - params.Lz) > 1e-9 * params.Lz:
        raise ValueError("mesh extents do not match the scenario domain")
    x, z = node_coordinates(mesh, basis)
    p = background_pressure(params, gas, z)
    T = params.T0 + temperature_perturbation(params, gas, x, z)
    rho = p / (gas.R * T)
    zero = np.zeros_like(p)
    q = conserved_from_primitive(rho, zero, zero, zero, p, gas)
    layout = DofLayout(mesh.nx, mesh.nz, basis.n_nodes)
    state = ConservedField(np.stack(q), layout)
    state.validate()
    return state
