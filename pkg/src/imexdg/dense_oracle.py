"""Dense quadrature-loop assembly used as a test oracle.

Everything here is deliberately slow and literal: cardinal functions are
monomial-basis polynomials built from their roots, derivatives come from
polynomial differentiation, and assembly loops run over the explicit mesh
face table. None of the vectorized kernel machinery is reused, so agreement
with the matrix-free operators to 1e-12 is a genuine cross-check of
quadrature weights, derivative scalings, face orientation and boundary
handling.

Guarded to small problems (<= 16 elements, degree <= 3).
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from numpy.polynomial import Polynomial

from .basis import TensorBasis
from .mesh import (FACE_BOTTOM, FACE_LEFT, FACE_RIGHT, FACE_TOP, ChannelMesh,
                   Face, FaceKind)
from .operators import StageContext
from .thermo import EN, MX, MY, MZ, RHO, ConservedField, GasConstants

MAX_ELEMENTS = 16
MAX_DEGREE = 3


def _guard(mesh: ChannelMesh, basis: TensorBasis) -> None:
    if mesh.n_elements > MAX_ELEMENTS or basis.degree > MAX_DEGREE:
        raise ValueError("dense oracle limited to <= 16 elements, degree <= 3")


class _Cardinals:
    """Cardinal Lagrange polynomials and derivatives in monomial form."""

    def __init__(self, nodes: np.ndarray):
        self.nodes = nodes
        self.polys = []
        self.derivs = []
        for j in range(len(nodes)):
            roots = np.delete(nodes, j)
            p = Polynomial.fromroots(roots)
            p = p / p(nodes[j])
            self.polys.append(p)
            self.derivs.append(p.deriv())

    def eval(self, x: float) -> np.ndarray:
        return np.array([p(x) for p in self.polys])

    def eval_deriv(self, x: float) -> np.ndarray:
        return np.array([d(x) for d in self.derivs])


class _Assembler:
    """Shared geometry/tabulation for the dense assembly routines."""

    def __init__(self, mesh: ChannelMesh, basis: TensorBasis,
                 gas: GasConstants):
        _guard(mesh, basis)
        self.mesh = mesh
        self.basis = basis
        self.gas = gas
        self.n1 = basis.n_nodes
        self.nloc = self.n1 * self.n1
        self.ns = mesh.n_elements * self.nloc
        self.card = _Cardinals(basis.nodes)
        n1 = self.n1

        # volume quadrature: points are the tensor nodes, local q = (qb, qa)
        self.wq = np.empty(self.nloc)
        self.phi = np.empty((self.nloc, self.nloc))     # [j, q]
        self.dphix = np.empty((self.nloc, self.nloc))   # d/dx physical
        self.dphiz = np.empty((self.nloc, self.nloc))
        lx = [self.card.eval(x) for x in basis.nodes]
        dlx = [self.card.eval_deriv(x) for x in basis.nodes]
        for qb in range(n1):
            for qa in range(n1):
                q = qb * n1 + qa
                self.wq[q] = basis.weights[qb] * basis.weights[qa] \
                    * mesh.jacobian
                for jb in range(n1):
                    for ja in range(n1):
                        j = jb * n1 + ja
                        self.phi[j, q] = lx[qb][jb] * lx[qa][ja]
                        self.dphix[j, q] = lx[qb][jb] * dlx[qa][ja] \
                            * (2.0 / mesh.hx)
                        self.dphiz[j, q] = dlx[qb][jb] * lx[qa][ja] \
                            * (2.0 / mesh.hz)

        # face traces: [side][j, qf] with qf running over the face nodes
        at_m1 = self.card.eval(-1.0)
        at_p1 = self.card.eval(1.0)
        self.trace = {}
        for side, (xv, zv) in ((FACE_LEFT, (at_m1, None)),
                               (FACE_RIGHT, (at_p1, None)),
                               (FACE_BOTTOM, (None, at_m1)),
                               (FACE_TOP, (None, at_p1))):
            T = np.empty((self.nloc, n1))
            for jb in range(n1):
                for ja in range(n1):
                    j = jb * n1 + ja
                    for qf in range(n1):
                        if xv is not None:      # vertical face, qf runs in z
                            T[j, qf] = lx[qf][jb] * xv[ja]
                        else:                   # horizontal face, qf in x
                            T[j, qf] = zv[jb] * lx[qf][ja]
            self.trace[side] = T

    def face_weights(self, face: Face) -> np.ndarray:
        h = self.mesh.hz if face.normal[0] != 0.0 else self.mesh.hx
        return self.basis.weights * (h / 2.0)

    def flat(self, field: np.ndarray) -> np.ndarray:
        """Structured scalar field -> (n_elements, nloc) nodal table."""
        nz, nx, n1 = self.mesh.nz, self.mesh.nx, self.n1
        return field.reshape(nz * nx, n1 * n1)

    def scalar_index(self, elem: int, local: int) -> int:
        return elem * self.nloc + local

    def vel_index(self, comp: int, elem: int, local: int) -> int:
        return comp * self.ns + self.scalar_index(elem, local)

    def trace_field(self, field_flat: np.ndarray, elem: int,
                    side: int) -> np.ndarray:
        """Nodal field values evaluated at the face quadrature points."""
        return field_flat[elem] @ self.trace[side]

    def face_sides(self, face: Face):
        """(elem, local side, n-dot-face-normal) for each existing side."""
        sides = [(face.elem_minus, face.side_minus, 1.0)]
        if face.elem_plus >= 0:
            sides.append((face.elem_plus, face.side_plus, -1.0))
        return sides


def _state_tables(asm: _Assembler, state: ConservedField):
    """Flat nodal tables for rho, m, rhoE and pressure."""
    d = state.data
    rho = asm.flat(d[RHO])
    m = [asm.flat(d[c]) for c in (MX, MY, MZ)]
    ke = 0.5 * (d[MX] ** 2 + d[MY] ** 2 + d[MZ] ** 2) / d[RHO]
    p = (asm.gas.gamma - 1.0) * (d[EN] - ke)
    return rho, m, asm.flat(p)


# ------------------------------------------------------------ operators

def dense_assemble(tag: str, mesh: ChannelMesh, basis: TensorBasis,
                   gas: GasConstants, state: ConservedField,
                   ctx: StageContext) -> np.ndarray:
    """Assemble one coupled-system operator as a dense matrix.

    ``tag`` is one of A, R, B, C, D, Mg. The density and (for C) the
    enthalpy coefficient are taken from ``state``.
    """
    asm = _Assembler(mesh, basis, gas)
    rho, _, p = _state_tables(asm, state)
    coef = ctx.a_diag * ctx.dt
    ns, nloc = asm.ns, asm.nloc

    if tag == "A":
        M = np.zeros((3 * ns, 3 * ns))
        for e in range(mesh.n_elements):
            rq = rho[e] @ asm.phi  # rho at quadrature points
            for i in range(nloc):
                for j in range(nloc):
                    v = np.sum(asm.wq * rq * asm.phi[i] * asm.phi[j])
                    for c in range(3):
                        M[asm.vel_index(c, e, i), asm.vel_index(c, e, j)] += v
        return M

    if tag == "R":
        M = np.zeros((3 * ns, 3 * ns))
        for e in range(mesh.n_elements):
            rq = rho[e] @ asm.phi
            for i in range(nloc):
                for j in range(nloc):
                    v = coef * gas.f * np.sum(asm.wq * rq * asm.phi[i]
                                              * asm.phi[j])
                    # k x phi_j: x-basis -> +y row, y-basis -> -x row
                    M[asm.vel_index(1, e, i), asm.vel_index(0, e, j)] += v
                    M[asm.vel_index(0, e, i), asm.vel_index(1, e, j)] -= v
        return M

    if tag == "D":
        M = np.zeros((ns, ns))
        for e in range(mesh.n_elements):
            for i in range(nloc):
                for j in range(nloc):
                    M[asm.scalar_index(e, i), asm.scalar_index(e, j)] += \
                        np.sum(asm.wq * asm.phi[i] * asm.phi[j]) \
                        / (gas.gamma - 1.0)
        return M

    if tag == "Mg":
        M = np.zeros((ns, 3 * ns))
        for e in range(mesh.n_elements):
            rq = rho[e] @ asm.phi
            for i in range(nloc):
                for j in range(nloc):
                    M[asm.scalar_index(e, i), asm.vel_index(2, e, j)] += \
                        gas.g * coef * np.sum(asm.wq * rq * asm.phi[i]
                                              * asm.phi[j])
        return M

    if tag == "B":
        M = np.zeros((3 * ns, ns))
        for e in range(mesh.n_elements):
            for i in range(nloc):
                for j in range(nloc):
                    M[asm.vel_index(0, e, i), asm.scalar_index(e, j)] -= \
                        coef * np.sum(asm.wq * asm.dphix[i] * asm.phi[j])
                    M[asm.vel_index(2, e, i), asm.scalar_index(e, j)] -= \
                        coef * np.sum(asm.wq * asm.dphiz[i] * asm.phi[j])
        for face in mesh.faces:
            wf = asm.face_weights(face)
            sides = asm.face_sides(face)
            avg = 1.0 if face.is_wall else 0.5
            for ei, si, sgn_i in sides:
                for ej, sj, _ in sides:
                    for i in range(nloc):
                        ti = asm.trace[si][i]
                        for j in range(nloc):
                            tj = asm.trace[sj][j]
                            v = coef * np.sum(wf * avg * tj * ti)
                            for c in range(2):
                                nc = face.normal[c] * sgn_i
                                if nc != 0.0:
                                    row = asm.vel_index(2 * c, ei, i)
                                    M[row, asm.scalar_index(ej, j)] += v * nc
        return M

    if tag == "C":
        hro = gas.gamma / (gas.gamma - 1.0) * p
        M = np.zeros((ns, 3 * ns))
        for e in range(mesh.n_elements):
            cq = hro[e] @ asm.phi
            for i in range(nloc):
                for j in range(nloc):
                    M[asm.scalar_index(e, i), asm.vel_index(0, e, j)] -= \
                        coef * np.sum(asm.wq * cq * asm.phi[j] * asm.dphix[i])
                    M[asm.scalar_index(e, i), asm.vel_index(2, e, j)] -= \
                        coef * np.sum(asm.wq * cq * asm.phi[j] * asm.dphiz[i])
        for face in mesh.faces:
            if face.is_wall:
                continue  # mirror state cancels the wall flux
            wf = asm.face_weights(face)
            sides = asm.face_sides(face)
            for ei, si, sgn_i in sides:
                for ej, sj, _ in sides:
                    cq = asm.trace_field(hro, ej, sj)
                    for i in range(nloc):
                        ti = asm.trace[si][i]
                        for j in range(nloc):
                            tj = asm.trace[sj][j]
                            v = coef * np.sum(wf * 0.5 * cq * tj * ti)
                            for c in range(2):
                                nc = face.normal[c] * sgn_i
                                if nc != 0.0:
                                    M[asm.scalar_index(ei, i),
                                      asm.vel_index(2 * c, ej, j)] += v * nc
        return M

    raise ValueError(f"unknown operator tag {tag!r}")


# ------------------------------------------------- advective weak forms

def _face_states(asm: _Assembler, face: Face, rho, m):
    """Traced (rho, m) on both sides; walls get the mirror ghost."""
    em, sm = face.elem_minus, face.side_minus
    r_m = asm.trace_field(rho, em, sm)
    m_m = [asm.trace_field(m[c], em, sm) for c in range(3)]
    if face.elem_plus >= 0:
        ep, sp = face.elem_plus, face.side_plus
        r_p = asm.trace_field(rho, ep, sp)
        m_p = [asm.trace_field(m[c], ep, sp) for c in range(3)]
    else:
        r_p = r_m.copy()
        m_p = [m_m[0].copy(), m_m[1].copy(), -m_m[2]]
    return r_m, m_m, r_p, m_p


def oracle_advective_forms(mesh: ChannelMesh, basis: TensorBasis,
                           gas: GasConstants,
                           state: ConservedField) -> list[np.ndarray]:
    """Weighted Rusanov divergence forms of (rho, m_x, m_y, m_z, rho*kappa),
    matching the kernel ``advect5`` convention."""
    asm = _Assembler(mesh, basis, gas)
    rho, m, _ = _state_tables(asm, state)
    out = [np.zeros(asm.ns) for _ in range(5)]
    nloc = asm.nloc

    for e in range(mesh.n_elements):
        rq = rho[e] @ asm.phi
        mq = [m[c][e] @ asm.phi for c in range(3)]
        uq = [mq[c] / rq for c in range(3)]
        kq = 0.5 * (mq[0] ** 2 + mq[1] ** 2 + mq[2] ** 2) / rq ** 2
        fx = [mq[0], mq[0] * uq[0], mq[1] * uq[0], mq[2] * uq[0], kq * mq[0]]
        fz = [mq[2], mq[0] * uq[2], mq[1] * uq[2], mq[2] * uq[2], kq * mq[2]]
        for i in range(nloc):
            gi = asm.scalar_index(e, i)
            for v in range(5):
                out[v][gi] -= np.sum(asm.wq * (fx[v] * asm.dphix[i]
                                               + fz[v] * asm.dphiz[i]))

    for face in mesh.faces:
        wf = asm.face_weights(face)
        r_m, m_m, r_p, m_p = _face_states(asm, face, rho, m)
        nvec = face.normal
        un_m = (m_m[0] * nvec[0] + m_m[2] * nvec[1]) / r_m
        un_p = (m_p[0] * nvec[0] + m_p[2] * nvec[1]) / r_p
        lam = np.maximum(np.abs(un_m), np.abs(un_p))
        k_m = 0.5 * (m_m[0] ** 2 + m_m[1] ** 2 + m_m[2] ** 2) / r_m ** 2
        k_p = 0.5 * (m_p[0] ** 2 + m_p[1] ** 2 + m_p[2] ** 2) / r_p ** 2
        # Fhat.n for the five advected quantities
        fh = [0.5 * (r_m * un_m + r_p * un_p) + 0.5 * lam * (r_m - r_p)]
        for c in range(3):
            fh.append(0.5 * (m_m[c] * un_m + m_p[c] * un_p)
                      + 0.5 * lam * (m_m[c] - m_p[c]))
        fh.append(0.5 * (r_m * k_m * un_m + r_p * k_p * un_p)
                  + 0.5 * lam * (r_m * k_m - r_p * k_p))
        for ei, si, sgn_i in asm.face_sides(face):
            for i in range(nloc):
                ti = asm.trace[si][i]
                gi = asm.scalar_index(ei, i)
                for v in range(5):
                    out[v][gi] += sgn_i * np.sum(wf * fh[v] * ti)
    return out


def oracle_fg_vector(mesh: ChannelMesh, basis: TensorBasis,
                     gas: GasConstants, rho_field: np.ndarray,
                     ctx: StageContext) -> np.ndarray:
    """Gravity vector f_g (w component of the velocity-space vector)."""
    asm = _Assembler(mesh, basis, gas)
    rho = asm.flat(rho_field)
    out = np.zeros(3 * asm.ns)
    for e in range(mesh.n_elements):
        rq = rho[e] @ asm.phi
        for i in range(asm.nloc):
            out[asm.vel_index(2, e, i)] += gas.g * ctx.a_diag * ctx.dt \
                * np.sum(asm.wq * rq * asm.phi[i])
    return out


def oracle_momentum_rhs(mesh: ChannelMesh, basis: TensorBasis,
                        gas: GasConstants,
                        states: Sequence[ConservedField],
                        ctx: StageContext) -> np.ndarray:
    """The momentum RHS vector f, assembled by slow loops."""
    asm = _Assembler(mesh, basis, gas)
    out = np.zeros(3 * asm.ns)
    nloc = asm.nloc

    rho0, m0, _ = _state_tables(asm, states[0])
    for e in range(mesh.n_elements):
        for c in range(3):
            mq = m0[c][e] @ asm.phi
            for i in range(nloc):
                out[asm.vel_index(c, e, i)] += np.sum(asm.wq * mq
                                                      * asm.phi[i])

    for midx, (a, at) in enumerate(zip(ctx.a_row, ctx.at_row)):
        st = states[midx]
        rho, m, p = _state_tables(asm, st)
        if a != 0.0:
            forms = oracle_advective_forms(mesh, basis, gas, st)
            for c in range(3):
                out[c * asm.ns:(c + 1) * asm.ns] -= a * ctx.dt * forms[1 + c]
        if at != 0.0:
            for e in range(mesh.n_elements):
                pq = p[e] @ asm.phi
                rq = rho[e] @ asm.phi
                mxq = m[0][e] @ asm.phi
                myq = m[1][e] @ asm.phi
                for i in range(nloc):
                    # + at dt int p div(phi_i); gravity and Coriolis history
                    out[asm.vel_index(0, e, i)] += at * ctx.dt * (
                        np.sum(asm.wq * pq * asm.dphix[i])
                        + gas.f * np.sum(asm.wq * myq * asm.phi[i]))
                    out[asm.vel_index(1, e, i)] -= at * ctx.dt * gas.f \
                        * np.sum(asm.wq * mxq * asm.phi[i])
                    out[asm.vel_index(2, e, i)] += at * ctx.dt * (
                        np.sum(asm.wq * pq * asm.dphiz[i])
                        - gas.g * np.sum(asm.wq * rq * asm.phi[i]))
            for face in mesh.faces:
                wf = asm.face_weights(face)
                sides = asm.face_sides(face)
                avg = 1.0 if face.is_wall else 0.5
                pavg = np.zeros(asm.n1)
                for ej, sj, _ in sides:
                    pavg += avg * asm.trace_field(p, ej, sj)
                for ei, si, sgn_i in sides:
                    for i in range(nloc):
                        ti = asm.trace[si][i]
                        v = np.sum(wf * pavg * ti)
                        for c in range(2):
                            nc = face.normal[c] * sgn_i
                            if nc != 0.0:
                                out[asm.vel_index(2 * c, ei, i)] -= \
                                    at * ctx.dt * v * nc
    return out


def oracle_energy_rhs(mesh: ChannelMesh, basis: TensorBasis,
                      gas: GasConstants, states: Sequence[ConservedField],
                      rho_stage: np.ndarray,
                      iterate: tuple[np.ndarray, np.ndarray],
                      ctx: StageContext) -> np.ndarray:
    """The energy RHS vector g, assembled by slow loops.

    ``rho_stage`` is the explicitly updated stage density entering the
    lagged stage-diagonal penalty; ``iterate = (u, p)``.
    """
    asm = _Assembler(mesh, basis, gas)
    out = np.zeros(asm.ns)
    nloc = asm.nloc

    e0 = asm.flat(states[0].data[EN])
    for e in range(mesh.n_elements):
        eq = e0[e] @ asm.phi
        for i in range(nloc):
            out[asm.scalar_index(e, i)] += np.sum(asm.wq * eq * asm.phi[i])

    for midx, (a, at) in enumerate(zip(ctx.a_row, ctx.at_row)):
        st = states[midx]
        rho, m, p = _state_tables(asm, st)
        if a != 0.0:
            forms = oracle_advective_forms(mesh, basis, gas, st)
            out -= a * ctx.dt * forms[4]
        if at != 0.0:
            hro = gas.gamma / (gas.gamma - 1.0) * p
            for e in range(mesh.n_elements):
                cq = hro[e] @ asm.phi
                rq = rho[e] @ asm.phi
                uq = [m[c][e] @ asm.phi / rq for c in range(3)]
                mzq = m[2][e] @ asm.phi
                for i in range(nloc):
                    out[asm.scalar_index(e, i)] += at * ctx.dt * (
                        np.sum(asm.wq * cq * (uq[0] * asm.dphix[i]
                                              + uq[2] * asm.dphiz[i]))
                        - gas.g * np.sum(asm.wq * mzq * asm.phi[i]))
            for face in mesh.faces:
                if face.is_wall:
                    continue
                wf = asm.face_weights(face)
                sides = asm.face_sides(face)
                r_m, m_m, r_p, m_p = _face_states(asm, face, rho, m)
                nvec = face.normal
                un_m = (m_m[0] * nvec[0] + m_m[2] * nvec[1]) / r_m
                un_p = (m_p[0] * nvec[0] + m_p[2] * nvec[1]) / r_p
                lam = np.maximum(np.abs(un_m), np.abs(un_p))
                hn_m = asm.trace_field(hro, face.elem_minus, face.side_minus)
                hn_p = asm.trace_field(hro, face.elem_plus, face.side_plus)
                re_m = asm.trace_field(p, face.elem_minus, face.side_minus) \
                    / (gas.gamma - 1.0)
                re_p = asm.trace_field(p, face.elem_plus, face.side_plus) \
                    / (gas.gamma - 1.0)
                fh = 0.5 * (hn_m * un_m + hn_p * un_p) \
                    + 0.5 * lam * (re_m - re_p)
                for ei, si, sgn_i in sides:
                    for i in range(nloc):
                        ti = asm.trace[si][i]
                        out[asm.scalar_index(ei, i)] += sgn_i * at * ctx.dt \
                            * np.sum(wf * fh * ti)

    # stage-diagonal lagged penalty on rho*e
    u_it, p_it = iterate
    rhos = asm.flat(rho_stage)
    mits = [asm.flat(rho_stage * u_it[c]) for c in range(3)]
    pit = asm.flat(p_it)
    for face in mesh.faces:
        if face.is_wall:
            continue
        wf = asm.face_weights(face)
        sides = asm.face_sides(face)
        r_m, m_m, r_p, m_p = _face_states(asm, face, rhos, mits)
        nvec = face.normal
        lam = np.maximum(np.abs((m_m[0] * nvec[0] + m_m[2] * nvec[1]) / r_m),
                         np.abs((m_p[0] * nvec[0] + m_p[2] * nvec[1]) / r_p))
        re_m = asm.trace_field(pit, face.elem_minus, face.side_minus) \
            / (gas.gamma - 1.0)
        re_p = asm.trace_field(pit, face.elem_plus, face.side_plus) \
            / (gas.gamma - 1.0)
        pen = 0.5 * lam * (re_m - re_p)
        for ei, si, sgn_i in sides:
            for i in range(nloc):
                ti = asm.trace[si][i]
                out[asm.scalar_index(ei, i)] -= ctx.a_diag * ctx.dt * sgn_i \
                    * np.sum(wf * pen * ti)
    return out
