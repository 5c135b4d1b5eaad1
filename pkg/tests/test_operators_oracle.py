"""Matrix-free operator actions vs the dense quadrature-loop oracle."""

import numpy as np
import pytest

from imexdg.basis import DofLayout, gauss_legendre
from imexdg.dense_oracle import (dense_assemble, oracle_advective_forms,
                                 oracle_energy_rhs, oracle_fg_vector,
                                 oracle_momentum_rhs)
from imexdg.mesh import build_mesh
from imexdg.operators import DGOperators, StageContext
from imexdg.thermo import ConservedField, GasConstants, conserved_from_primitive

GAS = GasConstants(gamma=1.4, R=287.0, g=9.81, f=1.0e-4)

CONFIGS = [(1, 1, 1), (2, 1, 2), (1, 2, 2), (2, 2, 3)]


def make_ops(nx, nz, r, gas=GAS):
    mesh = build_mesh(nx, nz, 2.0 * nx, 1.5 * nz)
    return DGOperators(mesh, gauss_legendre(r), gas)


def make_ctx(stage=2, dt=0.3, f=GAS.f):
    if stage == 2:
        a_row, at_row = (0.58578,), (0.29289,)
    else:
        a_row, at_row = (0.5, 0.5), (0.35355, 0.35355)
    a_diag = 0.29289
    return StageContext(stage=stage, dt=dt, a_diag=a_diag, a_row=a_row,
                        at_row=at_row, beta=a_diag * dt * f)


def random_state(ops, rng, calm=False):
    shape = ops.pshape
    rho = 1.0 + 0.3 * rng.uniform(-1, 1, shape)
    scale = 1.0 if calm else 20.0
    u, v, w = (scale * rng.uniform(-1, 1, shape) for _ in range(3))
    p = 1.0e5 * (1.0 + 0.2 * rng.uniform(-1, 1, shape))
    q = conserved_from_primitive(rho, u, v, w, p, ops.gas)
    layout = DofLayout(ops.mesh.nx, ops.mesh.nz, ops.basis.n_nodes)
    return ConservedField(np.stack(q), layout)


def flat_u(u3):
    return u3.reshape(3, -1).ravel()


def rel_err(got, want):
    scale = max(np.max(np.abs(want)), 1e-300)
    return np.max(np.abs(got - want)) / scale


@pytest.mark.parametrize("nx,nz,r", CONFIGS)
def test_mass_matrix_against_dense(nx, nz, r):
    rng = np.random.default_rng(10 * nx + nz + r)
    ops = make_ops(nx, nz, r)
    ctx = make_ctx()
    state = random_state(ops, rng)
    A = dense_assemble("A", ops.mesh, ops.basis, GAS, state, ctx)
    for _ in range(3):
        u = rng.standard_normal(ops.ushape)
        got = flat_u(ops.apply_mass_rho(u, state.rho))
        assert rel_err(got, A @ flat_u(u)) <= 1e-12


def test_mass_diagonal_unit_case():
    # rho = 1, r = 1, hx = hz = 2: every diagonal weight is exactly 1
    mesh = build_mesh(1, 1, 2.0, 2.0)
    ops = DGOperators(mesh, gauss_legendre(1), GAS)
    rho = np.ones(ops.pshape)
    u = np.ones(ops.ushape)
    assert np.allclose(ops.apply_mass_rho(u, rho), 1.0, atol=1e-15)


def test_mass_of_constant_integrates_domain():
    ops = make_ops(2, 2, 2)
    rho = np.ones(ops.pshape)
    u = np.full(ops.ushape, 3.0)
    total = np.sum(ops.apply_mass_rho(u, rho)[0])
    assert total == pytest.approx(3.0 * ops.mesh.Lx * ops.mesh.Lz, rel=1e-13)


@pytest.mark.parametrize("nx,nz,r", CONFIGS)
def test_inverse_mass(nx, nz, r):
    rng = np.random.default_rng(3)
    ops = make_ops(nx, nz, r)
    state = random_state(ops, rng)
    for _ in range(5):
        x = rng.standard_normal(ops.ushape)
        back = ops.apply_inv_mass_rho(ops.apply_mass_rho(x, state.rho),
                                      state.rho)
        assert rel_err(back, x) <= 1e-13
    # doubling rho halves the inverse action
    ones = np.ones(ops.ushape)
    a1 = ops.apply_inv_mass_rho(ones, np.ones(ops.pshape))
    a2 = ops.apply_inv_mass_rho(ones, 2.0 * np.ones(ops.pshape))
    assert rel_err(2.0 * a2, a1) <= 1e-14
    with pytest.raises(ValueError):
        ops.apply_inv_mass_rho(ones, np.zeros(ops.pshape))


def test_inverse_mass_against_dense_solve():
    rng = np.random.default_rng(4)
    ops = make_ops(1, 1, 1)
    ctx = make_ctx()
    state = random_state(ops, rng)
    A = dense_assemble("A", ops.mesh, ops.basis, GAS, state, ctx)
    v = rng.standard_normal(ops.ushape)
    want = np.linalg.solve(A, flat_u(v))
    got = flat_u(ops.apply_inv_mass_rho(v, state.rho))
    assert rel_err(got, want) <= 1e-12


@pytest.mark.parametrize("nx,nz,r", CONFIGS)
def test_coriolis_against_dense(nx, nz, r):
    rng = np.random.default_rng(5)
    ops = make_ops(nx, nz, r)
    ctx = make_ctx()
    state = random_state(ops, rng)
    R = dense_assemble("R", ops.mesh, ops.basis, GAS, state, ctx)
    for _ in range(3):
        u = rng.standard_normal(ops.ushape)
        got = flat_u(ops.apply_coriolis_R(u, state.rho, ctx))
        assert rel_err(got, R @ flat_u(u)) <= 1e-12


def test_coriolis_zero_f_and_direction():
    ops = make_ops(2, 2, 1)
    rho = np.ones(ops.pshape)
    ctx0 = StageContext(2, 0.3, 0.29289, (0.58578,), (0.29289,), beta=0.0)
    u = np.zeros(ops.ushape)
    u[0] = 1.0
    assert np.all(ops.apply_coriolis_R(u, rho, ctx0) == 0.0)
    ctx = make_ctx()
    out = ops.apply_coriolis_R(u, rho, ctx)
    # J(1,0,0) = (0,1,0): only the y row is set, with the mass weights
    assert np.all(out[0] == 0.0) and np.all(out[2] == 0.0)
    assert rel_err(out[1], ctx.beta * np.broadcast_to(ops.W, ops.pshape)) \
        <= 1e-14


def test_coriolis_dense_antisymmetric_for_constant_rho():
    ops = make_ops(2, 2, 2)
    ctx = make_ctx()
    layout = DofLayout(2, 2, 3)
    state = ConservedField.zeros(layout)
    state.data[0] = 1.0
    state.data[4] = 2.5e5
    R = dense_assemble("R", ops.mesh, ops.basis, GAS, state, ctx)
    assert np.max(np.abs(R + R.T)) <= 1e-12 * np.max(np.abs(R))


@pytest.mark.parametrize("beta", [0.0, 0.01, 0.5, 1.0, 3.0])
def test_rotation_factorization_inverse(beta):
    rng = np.random.default_rng(int(beta * 100) + 1)
    ops = make_ops(2, 2, 2)
    state = random_state(ops, rng)
    ctx = StageContext(2, 0.3, 0.29289, (0.58578,), (0.29289,), beta=beta)
    for _ in range(3):
        x = rng.standard_normal(ops.ushape)
        fwd = ops.apply_mass_rho(x, state.rho) \
            + ops.apply_coriolis_R(x, state.rho, ctx)
        back = ops.apply_inv_A_plus_R(fwd, state.rho, ctx)
        assert rel_err(back, x) <= 1e-12


def test_rotation_beta_one_block():
    # the horizontal block of (I + J)^{-1} at beta = 1 is [[1, 1], [-1, 1]]/2
    ops = make_ops(1, 1, 1)
    rho = np.ones(ops.pshape)
    ctx = StageContext(2, 1.0, 1.0, (1.0,), (1.0,), beta=1.0)
    vx = np.zeros(ops.ushape)
    vx[0] = rho * ops.W      # A^{-1} of this is the pointwise x unit vector
    out = ops.apply_inv_A_plus_R(vx, rho, ctx)
    assert np.allclose(out[0], 0.5, atol=1e-14)
    assert np.allclose(out[1], -0.5, atol=1e-14)
    assert np.allclose(out[2], 0.0, atol=1e-14)
    vy = np.zeros(ops.ushape)
    vy[1] = rho * ops.W
    out = ops.apply_inv_A_plus_R(vy, rho, ctx)
    assert np.allclose(out[0], 0.5, atol=1e-14)
    assert np.allclose(out[1], 0.5, atol=1e-14)


@pytest.mark.parametrize("nx,nz,r", CONFIGS)
def test_pressure_gradient_against_dense(nx, nz, r):
    rng = np.random.default_rng(6)
    ops = make_ops(nx, nz, r)
    ctx = make_ctx()
    state = random_state(ops, rng)
    B = dense_assemble("B", ops.mesh, ops.basis, GAS, state, ctx)
    for _ in range(3):
        p = 1e5 * rng.standard_normal(ops.pshape)
        got = flat_u(ops.apply_pressure_gradient_B(p, ctx))
        assert rel_err(got, B @ p.ravel()) <= 1e-12


def test_pressure_gradient_constant_is_zero():
    ops = make_ops(3, 2, 2)
    ctx = make_ctx()
    p = np.full(ops.pshape, 7.5e4)
    out = ops.apply_pressure_gradient_B(p, ctx)
    assert np.max(np.abs(out)) <= 1e-12 * 7.5e4 * np.max(ops.W)


def test_pressure_gradient_linear_in_z_exact():
    # p = z is continuous across walls-in-z: the weak gradient reproduces
    # the L2 action of dp/dz = 1 exactly
    from imexdg.scenarios import node_coordinates
    ops = make_ops(2, 3, 2)
    ctx = make_ctx()
    _, z = node_coordinates(ops.mesh, ops.basis)
    out = ops.apply_pressure_gradient_B(np.ascontiguousarray(z), ctx)
    W = np.broadcast_to(ops.W, ops.pshape)
    assert rel_err(out[2], ctx.coef * W) <= 1e-12
    assert np.max(np.abs(out[0])) <= 1e-12 * np.max(ctx.coef * W)
    assert np.all(out[1] == 0.0)


def test_pressure_gradient_scaling_linearity():
    ops = make_ops(2, 2, 1)
    rng = np.random.default_rng(8)
    p = rng.standard_normal(ops.pshape)
    c1 = make_ctx(dt=0.3)
    c2 = make_ctx(dt=0.6)
    assert rel_err(ops.apply_pressure_gradient_B(p, c2),
                   2.0 * ops.apply_pressure_gradient_B(p, c1)) <= 1e-14


@pytest.mark.parametrize("nx,nz,r", CONFIGS)
def test_enthalpy_div_against_dense(nx, nz, r):
    rng = np.random.default_rng(7)
    ops = make_ops(nx, nz, r)
    ctx = make_ctx()
    state = random_state(ops, rng)
    C = dense_assemble("C", ops.mesh, ops.basis, GAS, state, ctx)
    for _ in range(3):
        u = rng.standard_normal(ops.ushape)
        got = ops.apply_enthalpy_div_C(u, state, ctx).ravel()
        assert rel_err(got, C @ flat_u(u)) <= 1e-12


def test_enthalpy_div_zero_velocity_and_telescoping():
    ops = make_ops(3, 2, 2)
    ctx = make_ctx()
    rng = np.random.default_rng(9)
    state = random_state(ops, rng)
    assert np.all(ops.apply_enthalpy_div_C(np.zeros(ops.ushape), state, ctx)
                  == 0.0)
    # constant h rho u with w = 0: the action sums to zero over the domain
    u = np.zeros(ops.ushape)
    u[0] = 2.5
    p = np.full(ops.pshape, 9.0e4)
    out = ops.apply_C_with_pressure(u, p, ctx)
    assert abs(np.sum(out)) <= 1e-12 * (np.sum(np.abs(out)) + 1.0)


@pytest.mark.parametrize("nx,nz,r", CONFIGS)
def test_energy_mass_D(nx, nz, r):
    ops = make_ops(nx, nz, r)
    ctx = make_ctx()
    rng = np.random.default_rng(11)
    state = random_state(ops, rng)
    D = dense_assemble("D", ops.mesh, ops.basis, GAS, state, ctx)
    p = rng.standard_normal(ops.pshape)
    assert rel_err(ops.apply_energy_mass_D(p).ravel(), D @ p.ravel()) <= 1e-12
    # integral of a unit pressure: Lx * Lz / (gamma - 1)
    total = np.sum(ops.apply_energy_mass_D(np.ones(ops.pshape)))
    assert total == pytest.approx(ops.mesh.Lx * ops.mesh.Lz / 0.4, rel=1e-13)


@pytest.mark.parametrize("nx,nz,r", CONFIGS)
def test_gravity_coupling_against_dense(nx, nz, r):
    rng = np.random.default_rng(12)
    ops = make_ops(nx, nz, r)
    ctx = make_ctx()
    state = random_state(ops, rng)
    Mg = dense_assemble("Mg", ops.mesh, ops.basis, GAS, state, ctx)
    u = rng.standard_normal(ops.ushape)
    got = ops.apply_gravity_coupling_Mg(u, state.rho, ctx).ravel()
    assert rel_err(got, Mg @ flat_u(u)) <= 1e-12
    u[2] = 0.0
    assert np.all(ops.apply_gravity_coupling_Mg(u, state.rho, ctx) == 0.0)


def test_gravity_vector():
    ops = make_ops(2, 2, 2)
    ctx = make_ctx()
    rho = np.ones(ops.pshape)
    fg = ops.gravity_vector_fg(rho, ctx)
    assert np.all(fg[0] == 0.0) and np.all(fg[1] == 0.0)
    assert np.sum(fg[2]) == pytest.approx(
        GAS.g * ctx.coef * ops.mesh.Lx * ops.mesh.Lz, rel=1e-13)
    gas0 = GasConstants(gamma=1.4, R=287.0, g=0.0, f=GAS.f)
    ops0 = DGOperators(ops.mesh, ops.basis, gas0)
    assert np.all(ops0.gravity_vector_fg(rho, ctx) == 0.0)
    # dense comparison
    rng = np.random.default_rng(13)
    state = random_state(ops, rng)
    want = oracle_fg_vector(ops.mesh, ops.basis, GAS, state.rho, ctx)
    got = flat_u(ops.gravity_vector_fg(state.rho, ctx))
    assert rel_err(got, want) <= 1e-12


@pytest.mark.parametrize("nx,nz,r", CONFIGS)
def test_advective_forms_against_oracle(nx, nz, r):
    rng = np.random.default_rng(100 + 10 * nx + nz + r)
    ops = make_ops(nx, nz, r)
    for _ in range(3):
        state = random_state(ops, rng)
        want = oracle_advective_forms(ops.mesh, ops.basis, GAS, state)
        tend = ops.advective_tendency(state)
        W = np.broadcast_to(ops.W, ops.pshape)
        for v in range(5):
            got = (-tend[v] * W).ravel()
            assert rel_err(got, want[v]) <= 1e-12


@pytest.mark.parametrize("stage", [2, 3])
@pytest.mark.parametrize("nx,nz,r", [(2, 2, 2), (1, 2, 1)])
def test_momentum_rhs_f_against_oracle(nx, nz, r, stage):
    rng = np.random.default_rng(200 + stage)
    ops = make_ops(nx, nz, r)
    ctx = make_ctx(stage=stage)
    states = [random_state(ops, rng) for _ in range(stage - 1)]
    got = flat_u(ops.explicit_momentum_rhs_f(states, ctx))
    want = oracle_momentum_rhs(ops.mesh, ops.basis, GAS, states, ctx)
    assert rel_err(got, want) <= 1e-12


@pytest.mark.parametrize("stage", [2, 3])
@pytest.mark.parametrize("nx,nz,r", [(2, 2, 2), (2, 1, 1)])
def test_energy_rhs_g_against_oracle(nx, nz, r, stage):
    rng = np.random.default_rng(300 + stage)
    ops = make_ops(nx, nz, r)
    ctx = make_ctx(stage=stage)
    states = [random_state(ops, rng) for _ in range(stage - 1)]
    u_it = 10.0 * rng.standard_normal(ops.ushape)
    p_it = 1e5 * (1 + 0.1 * rng.uniform(-1, 1, ops.pshape))
    got = ops.explicit_energy_rhs_g(states, (u_it, p_it), ctx).ravel()
    rho_stage = ops.explicit_density_rhs(states, ctx)
    want = oracle_energy_rhs(ops.mesh, ops.basis, GAS, states, rho_stage,
                             (u_it, p_it), ctx)
    assert rel_err(got, want) <= 1e-12


def test_density_rhs_rest_state_unchanged():
    ops = make_ops(2, 2, 2)
    ctx = make_ctx(stage=3)
    layout = DofLayout(2, 2, 3)
    state = ConservedField.zeros(layout)
    state.data[0] = 1.3
    state.data[4] = 2.5e5
    rho = ops.explicit_density_rhs([state, state], ctx)
    assert np.max(np.abs(rho - 1.3)) <= 1e-14


def test_density_update_conserves_mass():
    rng = np.random.default_rng(15)
    ops = make_ops(2, 2, 3)
    ctx = make_ctx(stage=3)
    states = [random_state(ops, rng) for _ in range(2)]
    rho = ops.explicit_density_rhs(states, ctx)
    W = np.broadcast_to(ops.W, ops.pshape)
    before = np.sum(W * states[0].rho)
    after = np.sum(W * rho)
    assert after == pytest.approx(before, rel=1e-12)
