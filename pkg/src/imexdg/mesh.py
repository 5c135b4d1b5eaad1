"""Structured channel mesh: periodic in x, solid walls at bottom and top.

Elements are axis-aligned rectangles of uniform size, mapped affinely from
the reference square [-1, 1]^2, so the Jacobian determinant is the constant
hx*hz/4 per element. The face table lists every face once, oriented by a
unit normal pointing from the "minus" side to the "plus" side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

# local face ids within an element
FACE_LEFT, FACE_RIGHT, FACE_BOTTOM, FACE_TOP = 0, 1, 2, 3


class FaceKind(Enum):
    INTERIOR = "interior"
    PERIODIC_X = "periodic-x"
    WALL_BOTTOM = "wall-bottom"
    WALL_TOP = "wall-top"


@dataclass(frozen=True)
class Face:
    """One mesh face.

    For wall faces only the minus side exists (``elem_plus`` is -1); the
    normal then points out of the domain.
    """

    kind: FaceKind
    elem_minus: int
    side_minus: int
    elem_plus: int
    side_plus: int
    normal: tuple[float, float]

    @property
    def is_wall(self) -> bool:
        return self.kind in (FaceKind.WALL_BOTTOM, FaceKind.WALL_TOP)


@dataclass(frozen=True)
class ChannelMesh:
    nx: int
    nz: int
    Lx: float
    Lz: float
    hx: float
    hz: float
    faces: tuple[Face, ...]

    @property
    def n_elements(self) -> int:
        return self.nx * self.nz

    @property
    def jacobian(self) -> float:
        return self.hx * self.hz / 4.0

    def element_id(self, ex: int, ez: int) -> int:
        return ez * self.nx + ex

    def element_coords(self, element: int) -> tuple[int, int]:
        ez, ex = divmod(element, self.nx)
        return ex, ez

    def element_origin(self, element: int) -> tuple[float, float]:
        """Lower-left corner of the element in physical coordinates."""
        ex, ez = self.element_coords(element)
        return ex * self.hx, ez * self.hz

    def neighbor(self, element: int, side: int) -> tuple[int, int]:
        """Element/side seen through a face side; involutive across
        interior and periodic faces."""
        ex, ez = self.element_coords(element)
        if side == FACE_LEFT:
            return self.element_id((ex - 1) % self.nx, ez), FACE_RIGHT
        if side == FACE_RIGHT:
            return self.element_id((ex + 1) % self.nx, ez), FACE_LEFT
        if side == FACE_BOTTOM:
            if ez == 0:
                return -1, -1
            return self.element_id(ex, ez - 1), FACE_TOP
        if side == FACE_TOP:
            if ez == self.nz - 1:
                return -1, -1
            return self.element_id(ex, ez + 1), FACE_BOTTOM
        raise ValueError(f"invalid side {side}")


def build_mesh(nx: int, nz: int, Lx: float, Lz: float) -> ChannelMesh:
    """Construct the periodic-x / walled-z channel mesh."""
    if nx < 1 or nz < 1:
        raise ValueError("element counts must be >= 1")
    if Lx <= 0 or Lz <= 0:
        raise ValueError("domain extents must be positive")
    hx, hz = Lx / nx, Lz / nz

    faces: list[Face] = []
    # vertical faces (normal +x): face fx pairs column (fx-1) % nx with fx
    for ez in range(nz):
        for fx in range(nx):
            em = ez * nx + (fx - 1) % nx
            ep = ez * nx + fx
            kind = FaceKind.PERIODIC_X if fx == 0 else FaceKind.INTERIOR
            faces.append(Face(kind, em, FACE_RIGHT, ep, FACE_LEFT, (1.0, 0.0)))
    # horizontal faces: fz in 0..nz, walls at the extremes
    for fz in range(nz + 1):
        for ex in range(nx):
            if fz == 0:
                faces.append(Face(FaceKind.WALL_BOTTOM, ex, FACE_BOTTOM,
                                  -1, -1, (0.0, -1.0)))
            elif fz == nz:
                faces.append(Face(FaceKind.WALL_TOP, (nz - 1) * nx + ex,
                                  FACE_TOP, -1, -1, (0.0, 1.0)))
            else:
                em = (fz - 1) * nx + ex
                ep = fz * nx + ex
                faces.append(Face(FaceKind.INTERIOR, em, FACE_TOP,
                                  ep, FACE_BOTTOM, (0.0, 1.0)))
    return ChannelMesh(nx=nx, nz=nz, Lx=Lx, Lz=Lz, hx=hx, hz=hz,
                       faces=tuple(faces))


def min_diameter(mesh: ChannelMesh) -> float:
    """Minimum element diameter; the diagonal, since elements are uniform
    axis-aligned rectangles."""
    return math.sqrt(mesh.hx ** 2 + mesh.hz ** 2)
