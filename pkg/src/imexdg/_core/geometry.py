"""Precomputed geometry/basis arrays consumed by the kernel backends.

Fields live in structured layout (nz, nx, n1, n1) with axes
[element-row ez, element-column ex, z node jz, x node ix]. Flattening that
array yields the canonical dof ordering (element-major, z-major, x fastest).

Face conventions:
  * x faces: face ``fx`` (0..nx-1) sits between column ``(fx-1) % nx``
    (minus side) and column ``fx`` (plus side); unit normal +x. ``fx = 0``
    is the periodic wrap.
  * z faces: face ``fz`` (0..nz) between row ``fz-1`` and row ``fz``;
    normal +z. ``fz = 0`` and ``fz = nz`` are the solid walls.

All kernels return quadrature-weighted weak forms. The "divergence form"
of a flux F with numerical flux Fhat is

    div_i = -int F . grad(psi_i) + sum_faces Fhat.n (psi_i^- - psi_i^+),

so a Rusanov discretization is ``centered terms + jump penalty`` with
face value ``(lambda/2) (q^- - q^+)``.
"""

from __future__ import annotations

import numpy as np

from ..basis import TensorBasis
from ..mesh import ChannelMesh


class Geometry:
    """Bundle of mesh/basis constants used by every kernel."""

    __slots__ = ("nx", "nz", "n1", "hx", "hz", "jac", "w1", "W",
                 "wfx", "wfz", "D1", "D1T", "tL", "tR",
                 "scale_x", "scale_z")

    def __init__(self, mesh: ChannelMesh, basis: TensorBasis):
        self.nx = mesh.nx
        self.nz = mesh.nz
        self.n1 = basis.n_nodes
        self.hx = mesh.hx
        self.hz = mesh.hz
        self.jac = mesh.jacobian
        self.w1 = np.ascontiguousarray(basis.weights)
        # nodal volume weight W[jz, ix] = w[jz] w[ix] |J|
        self.W = np.ascontiguousarray(np.outer(self.w1, self.w1) * self.jac)
        # face quadrature weights including the 1D face Jacobian
        self.wfx = np.ascontiguousarray(self.w1 * mesh.hz / 2.0)  # per jz
        self.wfz = np.ascontiguousarray(self.w1 * mesh.hx / 2.0)  # per ix
        self.D1 = np.ascontiguousarray(basis.diff)
        self.D1T = np.ascontiguousarray(basis.diff.T)
        self.tL = np.ascontiguousarray(basis.trace_left)
        self.tR = np.ascontiguousarray(basis.trace_right)
        self.scale_x = 2.0 / mesh.hx
        self.scale_z = 2.0 / mesh.hz

    def grid_shape(self) -> tuple[int, int, int, int]:
        return (self.nz, self.nx, self.n1, self.n1)
