"""Tests for the Gauss-Legendre nodal basis and dof layout."""

import math

import numpy as np
import pytest

from imexdg.basis import DofLayout, eval_at_point, gauss_legendre


def legendre_gauss_oracle(n: int, iters: int = 60):
    """Independent GL rule: Newton iteration on P_n from the recurrence."""
    nodes = np.cos(np.pi * (np.arange(n) + 0.75) / (n + 0.5))
    for _ in range(iters):
        p0 = np.ones_like(nodes)
        p1 = nodes.copy()
        for k in range(2, n + 1):
            p0, p1 = p1, ((2 * k - 1) * nodes * p1 - (k - 1) * p0) / k
        dp = n * (nodes * p1 - p0) / (nodes ** 2 - 1.0)
        nodes -= p1 / dp
    p0 = np.ones_like(nodes)
    p1 = nodes.copy()
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * nodes * p1 - (k - 1) * p0) / k
    dp = n * (nodes * p1 - p0) / (nodes ** 2 - 1.0)
    weights = 2.0 / ((1.0 - nodes ** 2) * dp ** 2)
    order = np.argsort(nodes)
    return nodes[order], weights[order]


def test_two_point_rule_textbook():
    b = gauss_legendre(1)
    assert np.allclose(b.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)],
                       atol=1e-15)
    assert np.allclose(b.weights, [1.0, 1.0], atol=1e-15)


def test_three_point_rule_textbook():
    b = gauss_legendre(2)
    root = math.sqrt(3.0 / 5.0)
    assert np.allclose(b.nodes, [-root, 0.0, root], atol=1e-15)
    assert np.allclose(b.weights, [5 / 9, 8 / 9, 5 / 9], atol=1e-15)


@pytest.mark.parametrize("r", range(1, 9))
def test_nodes_weights_against_newton_oracle(r):
    b = gauss_legendre(r)
    nodes, weights = legendre_gauss_oracle(r + 1)
    assert np.max(np.abs(b.nodes - nodes)) <= 1e-14
    assert np.max(np.abs(b.weights - weights)) <= 1e-14


@pytest.mark.parametrize("r", range(1, 9))
def test_weight_sum_and_node_symmetry(r):
    b = gauss_legendre(r)
    assert abs(np.sum(b.weights) - 2.0) <= 1e-14
    assert np.all(np.diff(b.nodes) > 0)
    assert np.max(np.abs(b.nodes + b.nodes[::-1])) <= 1e-14


@pytest.mark.parametrize("r", range(1, 9))
def test_quadrature_exact_to_degree_2r_plus_1(r):
    b = gauss_legendre(r)
    for k in range(2 * r + 2):
        exact = 2.0 / (k + 1) if k % 2 == 0 else 0.0
        approx = float(np.sum(b.weights * b.nodes ** k))
        assert abs(approx - exact) <= 1e-12 * max(1.0, abs(exact))


def test_five_point_rule_integrates_x8():
    b = gauss_legendre(4)
    assert abs(np.sum(b.weights * b.nodes ** 8) - 2.0 / 9.0) <= 1e-14


@pytest.mark.parametrize("r", range(1, 9))
def test_diff_matrix_exact_on_monomials(r):
    b = gauss_legendre(r)
    for k in range(r + 1):
        deriv = b.diff @ (b.nodes ** k)
        exact = k * b.nodes ** (k - 1) if k > 0 else np.zeros_like(b.nodes)
        assert np.max(np.abs(deriv - exact)) <= 1e-12


@pytest.mark.parametrize("r", [1, 3, 6])
def test_partition_of_unity(r):
    b = gauss_legendre(r)
    rng = np.random.default_rng(7)
    x = rng.uniform(-1, 1, size=20)
    assert np.max(np.abs(b.eval_1d(x).sum(axis=-1) - 1.0)) <= 1e-13


def test_eval_deriv_consistent_with_diff_matrix():
    b = gauss_legendre(3)
    d = b.eval_deriv_1d(np.asarray(b.nodes))
    assert np.max(np.abs(d - b.diff)) <= 1e-12


@pytest.mark.parametrize("r", [0, 9, -2])
def test_unsupported_degree_rejected(r):
    with pytest.raises(ValueError):
        gauss_legendre(r)


def test_eval_at_point_constant_and_cardinal():
    b = gauss_legendre(2)
    coeffs = np.full((3, 3), 4.25)
    assert eval_at_point(coeffs, b, 0.3, -0.8) == pytest.approx(4.25, abs=1e-14)
    nodal = np.arange(9.0).reshape(3, 3)
    # evaluation at a node returns that coefficient bit-exactly
    for j in range(3):
        for i in range(3):
            assert eval_at_point(nodal, b, b.nodes[i], b.nodes[j]) \
                == nodal[j, i]


def test_eval_at_point_bilinear_exact():
    b = gauss_legendre(2)
    coeffs = np.outer(b.nodes, b.nodes)  # f(x, z) = x * z sampled at nodes
    rng = np.random.default_rng(3)
    for _ in range(10):
        x, z = rng.uniform(-1, 1, size=2)
        assert eval_at_point(coeffs, b, x, z) == pytest.approx(x * z,
                                                               abs=1e-13)


def test_eval_at_point_rejects_outside_reference():
    b = gauss_legendre(1)
    with pytest.raises(ValueError):
        eval_at_point(np.zeros((2, 2)), b, 1.5, 0.0)


def test_dof_layout_roundtrip():
    lay = DofLayout(nx=3, nz=2, n1=4)
    assert lay.n_dofs == 3 * 2 * 16
    seen = set()
    for e in range(lay.n_elements):
        for jz in range(4):
            for ix in range(4):
                flat = lay.flat_index(e, ix, jz)
                assert lay.unflatten(flat) == (e, ix, jz)
                seen.add(flat)
    assert seen == set(range(lay.n_dofs))
    with pytest.raises(IndexError):
        lay.flat_index(6, 0, 0)
    with pytest.raises(IndexError):
        lay.unflatten(lay.n_dofs)


def test_layout_matches_structured_reshape():
    lay = DofLayout(nx=2, nz=2, n1=3)
    field = np.arange(float(lay.n_dofs)).reshape(lay.grid_shape())
    flat = field.ravel()
    for ez in range(2):
        for ex in range(2):
            e = ez * 2 + ex
            for jz in range(3):
                for ix in range(3):
                    assert flat[lay.flat_index(e, ix, jz)] \
                        == field[ez, ex, jz, ix]
