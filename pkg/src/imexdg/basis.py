"""Nodal tensor-product DG basis on Gauss-Legendre points.

The basis is collocated: the (r+1) Gauss-Legendre quadrature points per
direction double as the interpolation nodes, so mass-type matrices are
diagonal. Since Gauss-Legendre nodes exclude the endpoints, face values are
obtained by evaluating the Lagrange cardinal functions at +-1 (the ``trace``
vectors below).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_DEGREE = 8


def _barycentric_weights(nodes: np.ndarray) -> np.ndarray:
    n = len(nodes)
    w = np.ones(n)
    for j in range(n):
        for k in range(n):
            if k != j:
                w[j] /= nodes[j] - nodes[k]
    return w


def _diff_matrix(nodes: np.ndarray) -> np.ndarray:
    """D[i, j] = derivative of cardinal function j at node i."""
    n = len(nodes)
    w = _barycentric_weights(nodes)
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                D[i, j] = (w[j] / w[i]) / (nodes[i] - nodes[j])
        D[i, i] = -np.sum(D[i, :])
    return D


def lagrange_eval(nodes: np.ndarray, x) -> np.ndarray:
    """Evaluate all cardinal functions at points ``x``.

    Returns an array of shape ``(*x.shape, len(nodes))``; exact cardinality
    (``l_j(xi_i) = delta_ij``) holds identically because the product formula
    contains a zero factor at the nodes.
    """
    x = np.asarray(x, dtype=float)
    n = len(nodes)
    out = np.ones(x.shape + (n,))
    for j in range(n):
        for k in range(n):
            if k != j:
                out[..., j] *= (x - nodes[k]) / (nodes[j] - nodes[k])
    return out


@dataclass(frozen=True)
class TensorBasis:
    """1D Gauss-Legendre nodal basis shared by both tensor directions.

    Attributes:
        degree: polynomial degree r; r+1 nodes.
        nodes: GL points in (-1, 1), strictly increasing.
        weights: GL quadrature weights (sum to 2).
        diff: differentiation matrix, ``diff[i, j] = l_j'(xi_i)``.
        trace_left / trace_right: cardinal values at -1 / +1.
    """

    degree: int
    nodes: np.ndarray
    weights: np.ndarray
    diff: np.ndarray
    trace_left: np.ndarray
    trace_right: np.ndarray
    _bary: np.ndarray = field(repr=False, default=None)

    @property
    def n_nodes(self) -> int:
        return self.degree + 1

    def eval_1d(self, x) -> np.ndarray:
        """Cardinal-function values at arbitrary reference points."""
        return lagrange_eval(self.nodes, x)

    def eval_deriv_1d(self, x) -> np.ndarray:
        """Cardinal-function derivatives at arbitrary reference points."""
        x = np.asarray(x, dtype=float)
        n = self.n_nodes
        out = np.zeros(x.shape + (n,))
        for j in range(n):
            # d/dx prod_k (x - xi_k)/(xi_j - xi_k) by the product rule
            for m in range(n):
                if m == j:
                    continue
                term = np.ones_like(x) / (self.nodes[j] - self.nodes[m])
                for k in range(n):
                    if k != j and k != m:
                        term *= (x - self.nodes[k]) / (self.nodes[j] - self.nodes[k])
                out[..., j] += term
        return out


def gauss_legendre(degree: int) -> TensorBasis:
    """Build the degree-r collocated basis; 1 <= r <= 8."""
    if not 1 <= degree <= MAX_DEGREE:
        raise ValueError(f"degree must be in [1, {MAX_DEGREE}], got {degree}")
    nodes, weights = np.polynomial.legendre.leggauss(degree + 1)
    return TensorBasis(
        degree=degree,
        nodes=nodes,
        weights=weights,
        diff=_diff_matrix(nodes),
        trace_left=lagrange_eval(nodes, -1.0),
        trace_right=lagrange_eval(nodes, 1.0),
        _bary=_barycentric_weights(nodes),
    )


@dataclass(frozen=True)
class DofLayout:
    """Flat indexing of nodal coefficients.

    Ordering is element-major (element id ``e = ez*nx + ex``), then z-major
    within the element with the x node index fastest:
    ``flat = (e*n1 + jz)*n1 + ix``.
    """

    nx: int
    nz: int
    n1: int

    @property
    def n_elements(self) -> int:
        return self.nx * self.nz

    @property
    def n_dofs(self) -> int:
        return self.n_elements * self.n1 * self.n1

    def flat_index(self, element: int, ix: int, jz: int) -> int:
        if not (0 <= element < self.n_elements
                and 0 <= ix < self.n1 and 0 <= jz < self.n1):
            raise IndexError("dof index out of range")
        return (element * self.n1 + jz) * self.n1 + ix

    def unflatten(self, flat: int) -> tuple[int, int, int]:
        """Inverse of :meth:`flat_index`: returns (element, ix, jz)."""
        if not 0 <= flat < self.n_dofs:
            raise IndexError("flat index out of range")
        element, rest = divmod(flat, self.n1 * self.n1)
        jz, ix = divmod(rest, self.n1)
        return element, ix, jz

    def grid_shape(self) -> tuple[int, int, int, int]:
        """Shape of a scalar field in structured form (nz, nx, n1, n1)."""
        return (self.nz, self.nx, self.n1, self.n1)


def eval_at_point(coeffs: np.ndarray, basis: TensorBasis, x_ref: float,
                  z_ref: float) -> float:
    """Evaluate one element's nodal expansion at a reference point.

    ``coeffs`` has shape (n1, n1) indexed [jz, ix]; ``(x_ref, z_ref)`` must
    lie in [-1, 1]^2.
    """
    if not (-1.0 <= x_ref <= 1.0 and -1.0 <= z_ref <= 1.0):
        raise ValueError("reference coordinates outside [-1, 1]^2")
    lx = basis.eval_1d(x_ref)
    lz = basis.eval_1d(z_ref)
    return float(lz @ coeffs @ lx)
