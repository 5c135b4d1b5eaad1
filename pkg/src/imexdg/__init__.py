"""Matrix-free IMEX-DG solver for the rotating compressible Euler equations
on a two-dimensional vertical slice."""

from ._core import active_backend
from .basis import DofLayout, TensorBasis, gauss_legendre
from .mesh import ChannelMesh, build_mesh, min_diameter
from .operators import DGOperators, StageContext
from .stage_solver import PicardConfig
from .tableau import ButcherPair, tableau
from .thermo import (ConservedField, GasConstants, InvalidStateError,
                     conserved_from_primitive, primitives_from_conserved)

__version__ = "0.1.0"

__all__ = [
    "ChannelMesh", "ConservedField", "DGOperators", "DofLayout",
    "GasConstants", "InvalidStateError", "PicardConfig", "StageContext",
    "TensorBasis", "ButcherPair", "active_backend", "build_mesh",
    "conserved_from_primitive", "gauss_legendre", "min_diameter",
    "primitives_from_conserved", "tableau",
]
