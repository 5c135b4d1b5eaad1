"""Matrix-free actions of every operator in the coupled stage system.

With a collocated Gauss-Legendre basis, the density-weighted velocity mass
operator A, the energy mass operator D, the gravity coupling M_g and the
gravity vector f_g are all pointwise-diagonal (weight ``rho * W`` per node),
the Coriolis operator factors as ``R = beta A J`` with ``J u = k x u``, and
``(A + R)^{-1}`` is A^{-1} followed by a pointwise planar rotation.

Velocity-space arrays have shape (3, nz, nx, n1, n1); pressure-space arrays
(nz, nx, n1, n1). All "apply_*" results are quadrature-weighted weak forms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _core
from ._core import Geometry
from .basis import DofLayout, TensorBasis
from .mesh import ChannelMesh
from .thermo import (EN, MX, MY, MZ, RHO, ConservedField, GasConstants,
                     pressure)


@dataclass(frozen=True)
class StageContext:
    """Weights of one implicit stage of the additive RK scheme.

    ``a_diag`` is the diagonal implicit coefficient; ``a_row`` / ``at_row``
    are the explicit / implicit weights of the completed stages m < l.
    ``beta = a_diag * dt * f`` controls the implicit Coriolis rotation.
    """

    stage: int
    dt: float
    a_diag: float
    a_row: tuple[float, ...]
    at_row: tuple[float, ...]
    beta: float

    @property
    def coef(self) -> float:
        """The common implicit scaling a_diag * dt."""
        return self.a_diag * self.dt


@dataclass(frozen=True)
class OperatorAction:
    """A linear map on flat dof vectors, as consumed by GMRES."""

    apply: Callable[[np.ndarray], np.ndarray]
    n_in: int
    n_out: int

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.apply(x)


def _check_shape(arr: np.ndarray, shape: tuple, what: str) -> None:
    if arr.shape != shape:
        raise ValueError(f"{what}: expected shape {shape}, got {arr.shape}")


class DGOperators:
    """All matrix-free operator actions on one mesh/basis/gas triple."""

    def __init__(self, mesh: ChannelMesh, basis: TensorBasis,
                 gas: GasConstants):
        self.mesh = mesh
        self.basis = basis
        self.gas = gas
        self.geom = Geometry(mesh, basis)
        self.layout = DofLayout(mesh.nx, mesh.nz, basis.n_nodes)
        # nodal quadrature weight, broadcast over the element grid
        self.W = np.broadcast_to(self.geom.W, self.layout.grid_shape())

    # ------------------------------------------------------------ shapes

    @property
    def pshape(self) -> tuple:
        return self.layout.grid_shape()

    @property
    def ushape(self) -> tuple:
        return (3,) + self.layout.grid_shape()

    # ----------------------------------------------------- mass operators

    def apply_mass_rho(self, u: np.ndarray, rho: np.ndarray) -> np.ndarray:
        """A u: density-weighted diagonal mass action per component."""
        _check_shape(u, self.ushape, "velocity dofs")
        _check_shape(rho, self.pshape, "density dofs")
        return u * (rho * self.W)

    def apply_inv_mass_rho(self, v: np.ndarray, rho: np.ndarray) -> np.ndarray:
        _check_shape(v, self.ushape, "velocity dofs")
        if np.any(rho <= 0.0):
            raise ValueError("apply_inv_mass_rho requires rho > 0")
        return v / (rho * self.W)

    def apply_energy_mass_D(self, p: np.ndarray) -> np.ndarray:
        """D p: unweighted mass action scaled by 1/(gamma - 1)."""
        _check_shape(p, self.pshape, "pressure dofs")
        return self.W * p / (self.gas.gamma - 1.0)

    # -------------------------------------------------- rotation operators

    @staticmethod
    def _vertical_cross(u: np.ndarray) -> np.ndarray:
        """J u = k x u = (-v, u, 0)."""
        out = np.empty_like(u)
        out[0] = -u[1]
        out[1] = u[0]
        out[2] = 0.0
        return out

    def apply_coriolis_R(self, u: np.ndarray, rho: np.ndarray,
                         ctx: StageContext) -> np.ndarray:
        """R u = beta A (J u); the vertical component is untouched."""
        return ctx.beta * self.apply_mass_rho(self._vertical_cross(u), rho)

    def apply_inv_A_plus_R(self, v: np.ndarray, rho: np.ndarray,
                           ctx: StageContext) -> np.ndarray:
        """(A + R)^{-1} v = (I + beta J)^{-1} A^{-1} v, applied pointwise."""
        t = self.apply_inv_mass_rho(v, rho)
        b = ctx.beta
        out = np.empty_like(t)
        den = 1.0 + b * b
        out[0] = (t[0] + b * t[1]) / den
        out[1] = (t[1] - b * t[0]) / den
        out[2] = t[2]
        return out

    # ------------------------------------------------- coupling operators

    def apply_pressure_gradient_B(self, p: np.ndarray,
                                  ctx: StageContext) -> np.ndarray:
        """B p: weak pressure gradient scaled by a_diag * dt."""
        _check_shape(p, self.pshape, "pressure dofs")
        gx, gz = _core.weak_gradient(p, self.geom)
        out = np.zeros(self.ushape)
        out[0] = ctx.coef * gx
        out[2] = ctx.coef * gz
        return out

    def enthalpy_coefficient(self, p: np.ndarray) -> np.ndarray:
        """h * rho is gamma/(gamma-1) * p for an ideal gas."""
        return self.gas.gamma / (self.gas.gamma - 1.0) * p

    def apply_enthalpy_div_C(self, u: np.ndarray, state: ConservedField,
                             ctx: StageContext) -> np.ndarray:
        """C u at the supplied iterate (coefficient h rho from its pressure)."""
        return self.apply_C_with_pressure(u, pressure(state, self.gas), ctx)

    def apply_C_with_pressure(self, u: np.ndarray, p: np.ndarray,
                              ctx: StageContext) -> np.ndarray:
        _check_shape(u, self.ushape, "velocity dofs")
        c = self.enthalpy_coefficient(p)
        return ctx.coef * _core.centered_div(c, u[0], u[2], self.geom)

    def apply_gravity_coupling_Mg(self, u: np.ndarray, rho: np.ndarray,
                                  ctx: StageContext) -> np.ndarray:
        """M_g u: g * a_diag * dt * rho-weighted mass action on w."""
        _check_shape(u, self.ushape, "velocity dofs")
        return self.gas.g * ctx.coef * rho * self.W * u[2]

    def gravity_vector_fg(self, rho: np.ndarray,
                          ctx: StageContext) -> np.ndarray:
        out = np.zeros(self.ushape)
        out[2] = self.gas.g * ctx.coef * rho * self.W
        return out

    def kinetic_vector(self, rho: np.ndarray, u: np.ndarray) -> np.ndarray:
        """k vector: mass action of rho |u|^2 / 2."""
        kap = 0.5 * np.sum(u * u, axis=0)
        return self.W * rho * kap

    # --------------------------------------------------- flux evaluations

    def face_lambdas(self, rho: np.ndarray, m: np.ndarray):
        """Rusanov speeds on interior/periodic faces from (rho, momentum)."""
        return _core.face_lambda(rho, m[0], m[2], self.geom)

    def energy_penalty(self, rho_e: np.ndarray, lam_x: np.ndarray,
                       lam_z: np.ndarray) -> np.ndarray:
        """Jump-penalty weak form on an internal-energy-like scalar."""
        return _core.jump_penalty(rho_e, lam_x, lam_z, self.geom)

    def advective_tendency(self, state: ConservedField) -> np.ndarray:
        """Nodal non-stiff tendencies: advection of (rho, m, rho*kappa)."""
        d = state.data
        forms = _core.advect5(d[RHO], d[MX], d[MY], d[MZ], self.geom)
        out = np.empty_like(d)
        for i, f in enumerate(forms):
            out[i] = -f / self.W
        return out

    def stiff_tendency(self, state: ConservedField) -> np.ndarray:
        """Nodal stiff tendencies: pressure gradient, enthalpy transport
        (with its jump penalty), gravity and Coriolis."""
        d = state.data
        gas = self.gas
        p = pressure(state, gas)
        gx, gz = _core.weak_gradient(p, self.geom)
        lam_x, lam_z = self.face_lambdas(d[RHO], d[MX:MZ + 1])
        rho_e = p / (gas.gamma - 1.0)
        u = d[MX:MZ + 1] / d[RHO]
        ediv = _core.centered_div(self.enthalpy_coefficient(p), u[0], u[2],
                                  self.geom)
        ediv += _core.jump_penalty(rho_e, lam_x, lam_z, self.geom)
        out = np.empty_like(d)
        out[RHO] = 0.0
        out[MX] = -gx / self.W + gas.f * d[MY]
        out[MY] = -gas.f * d[MX]
        out[MZ] = -gz / self.W - gas.g * d[RHO]
        out[EN] = -ediv / self.W - gas.g * d[MZ]
        return out

    # ------------------------------------------- stage right-hand sides

    def explicit_density_rhs(self, states: Sequence[ConservedField],
                             ctx: StageContext) -> np.ndarray:
        """Stage density: rho^n advanced by the explicit-stage mass fluxes."""
        rho = states[0].rho.copy()
        for m, a in enumerate(ctx.a_row):
            if a != 0.0:
                rho += ctx.dt * a * self.advective_tendency(states[m])[RHO]
        return rho

    def explicit_momentum_rhs_f(self, states: Sequence[ConservedField],
                                ctx: StageContext) -> np.ndarray:
        """The weighted momentum RHS vector f, assembled directly from the
        completed stage states."""
        f = self.W * states[0].momentum.copy()
        for m, (a, at) in enumerate(zip(ctx.a_row, ctx.at_row)):
            s = states[m]
            if a != 0.0:
                forms = _core.advect5(s.rho, s.data[MX], s.data[MY],
                                      s.data[MZ], self.geom)
                for c in range(3):
                    f[c] -= a * ctx.dt * forms[1 + c]
            if at != 0.0:
                p = pressure(s, self.gas)
                gx, gz = _core.weak_gradient(p, self.geom)
                f[0] -= at * ctx.dt * (gx - self.gas.f * self.W * s.data[MY])
                f[1] -= at * ctx.dt * self.gas.f * self.W * s.data[MX]
                f[2] -= at * ctx.dt * (gz + self.gas.g * self.W * s.rho)
        return f

    def explicit_energy_rhs_g(self, states: Sequence[ConservedField],
                              iterate: tuple[np.ndarray, np.ndarray],
                              ctx: StageContext) -> np.ndarray:
        """The weighted energy RHS vector g; ``iterate = (u, p)`` supplies
        the lagged stage-diagonal jump penalty on rho*e."""
        gas = self.gas
        gvec = self.W * states[0].rhoE.copy()
        for m, (a, at) in enumerate(zip(ctx.a_row, ctx.at_row)):
            s = states[m]
            p = pressure(s, gas)
            u = s.velocity()
            lam_x, lam_z = self.face_lambdas(s.rho, s.momentum)
            if a != 0.0:
                forms = _core.advect5(s.rho, s.data[MX], s.data[MY],
                                      s.data[MZ], self.geom)
                gvec -= a * ctx.dt * forms[4]
            if at != 0.0:
                ediv = _core.centered_div(self.enthalpy_coefficient(p),
                                          u[0], u[2], self.geom)
                ediv += _core.jump_penalty(p / (gas.gamma - 1.0),
                                           lam_x, lam_z, self.geom)
                gvec -= at * ctx.dt * (ediv + gas.g * self.W * s.data[MZ])
        # stage-diagonal penalty, lagged at the supplied Picard iterate
        u_it, p_it = iterate
        rho_stage = self.explicit_density_rhs(states, ctx)
        gvec += self.stage_penalty(rho_stage, u_it, p_it, ctx)
        return gvec

    def stage_penalty(self, rho_stage: np.ndarray, u_it: np.ndarray,
                      p_it: np.ndarray, ctx: StageContext) -> np.ndarray:
        """Lagged stage-l Rusanov penalty on rho*e, moved to the RHS."""
        m_it = rho_stage * u_it
        lam_x, lam_z = _core.face_lambda(rho_stage, m_it[0], m_it[2],
                                         self.geom)
        pen = _core.jump_penalty(p_it / (self.gas.gamma - 1.0),
                                 lam_x, lam_z, self.geom)
        return -ctx.coef * pen
