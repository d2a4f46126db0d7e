import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sgsem.discretization import (
    DiscreteSolution,
    ShapeError,
    fast_diagonalization_solve,
    jacobian_apply,
    jacobian_dense,
    residual,
    stiffness_kron,
    tensor_operators,
    unvec,
    vec,
)
from sgsem.eigen import RectDomain
from sgsem.lgl import lagrange_basis_matrix, lgl_nodes_weights
from sgsem.nonlinearity import cubic, sine_gordon, zero

REF = RectDomain(-1.0, 1.0, -1.0, 1.0)
SQ = RectDomain()


def full_exact_mass(N):
    lgl = lgl_nodes_weights(N)
    g, w = np.polynomial.legendre.leggauss(N + 1)
    H = lagrange_basis_matrix(lgl, g)
    return H.T @ (w[:, None] * H)


def test_zero_state_zero_residual():
    ops = tensor_operators(6, SQ)
    np.testing.assert_array_equal(residual(np.zeros(ops.shape), ops, sine_gordon(3)), 0)


def test_order_two_scalar_system():
    ops = tensor_operators(2, REF, mass="exact")
    c = 1.3
    expect = 2 * (8 / 3) * (16 / 15) * c - (16 / 15) ** 2 * c**3
    assert residual([[c]], ops, cubic())[0, 0] == pytest.approx(expect, rel=1e-13)
    assert abs(residual([[math.sqrt(5)]], ops, cubic())[0, 0]) < 1e-13
    J = jacobian_dense([[c]], ops, cubic())
    assert J[0, 0] == pytest.approx(2 * (8 / 3) * (16 / 15) - (16 / 15) ** 2 * 3 * c**2, rel=1e-13)


@pytest.mark.parametrize("N", [4, 7, 12])
def test_manufactured_exact_mass(N):
    # u = (1-x^2)(1-y^2) lies in the space, so the system reproduces the Galerkin load exactly
    ops = tensor_operators(N, REF, mass="exact")
    x = lgl_nodes_weights(N).nodes
    X, Y = np.meshgrid(x, x, indexing="ij")
    G = 2 * (1 - X**2) + 2 * (1 - Y**2)
    U = ((1 - X**2) * (1 - Y**2))[1:-1, 1:-1]
    Bf = full_exact_mass(N)
    load = Bf[1:-1, :] @ G @ Bf[:, 1:-1]
    np.testing.assert_allclose(residual(U, ops, zero()), load, atol=1e-12)


@pytest.mark.parametrize("N", [4, 9, 16])
def test_manufactured_lgl_mass(N):
    ops = tensor_operators(N, REF)
    x = lgl_nodes_weights(N).nodes
    X, Y = np.meshgrid(x, x, indexing="ij")
    G = (2 * (1 - X**2) + 2 * (1 - Y**2))[1:-1, 1:-1]
    U = ((1 - X**2) * (1 - Y**2))[1:-1, 1:-1]
    B = ops.ops_x.B
    np.testing.assert_allclose(residual(U, ops, zero()), B @ G @ B, atol=1e-12)
    np.testing.assert_allclose(fast_diagonalization_solve(ops, B @ G @ B), U, atol=1e-12)


def test_manufactured_exact_mass_solve():
    N = 10
    ops = tensor_operators(N, REF, mass="exact")
    x = lgl_nodes_weights(N).nodes
    X, Y = np.meshgrid(x, x, indexing="ij")
    G = 2 * (1 - X**2) + 2 * (1 - Y**2)
    Bf = full_exact_mass(N)
    U = fast_diagonalization_solve(ops, Bf[1:-1, :] @ G @ Bf[:, 1:-1])
    np.testing.assert_allclose(U, ((1 - X**2) * (1 - Y**2))[1:-1, 1:-1], atol=1e-12)


def test_scaling_to_physical_square():
    # u = x(pi-x) y(pi-y) on (0, pi)^2 with -Lap u = 2 y(pi-y) + 2 x(pi-x)
    N = 8
    ops = tensor_operators(N, SQ)
    x, y = ops.interior_nodes()
    X, Y = np.meshgrid(x, y, indexing="ij")
    U = X * (math.pi - X) * Y * (math.pi - Y)
    G = 2 * Y * (math.pi - Y) + 2 * X * (math.pi - X)
    B = ops.ops_x.B
    np.testing.assert_allclose(fast_diagonalization_solve(ops, B @ G @ B), U, atol=1e-12)


def test_per_direction_scaling():
    dom = RectDomain(0, 3.0, 0, 0.5)
    ops = tensor_operators(6, dom)
    base = tensor_operators(6, REF)
    np.testing.assert_allclose(ops.ops_x.A, base.ops_x.A * (2 / 3.0), rtol=1e-14)
    np.testing.assert_allclose(ops.ops_x.B, base.ops_x.B * (3.0 / 2), rtol=1e-14)
    np.testing.assert_allclose(ops.ops_y.A, base.ops_y.A * (2 / 0.5), rtol=1e-14)
    np.testing.assert_allclose(ops.ops_y.B, base.ops_y.B * (0.5 / 2), rtol=1e-14)
    for o in (ops.ops_x, ops.ops_y):
        assert np.linalg.eigvalsh(o.A).min() > 0 and np.linalg.eigvalsh(o.B).min() > 0


@pytest.mark.parametrize("mass", ["lgl", "exact"])
def test_fast_diagonalization_residual(mass):
    ops = tensor_operators(20, SQ, mass=mass)
    R = np.random.default_rng(3).normal(size=ops.shape)
    X = fast_diagonalization_solve(ops, R)
    Ax, Bx = ops.ops_x.A, ops.ops_x.B
    back = Ax @ X @ Bx + Bx @ X @ Ax
    assert np.linalg.norm(back - R) <= 1e-10 * np.linalg.norm(R)
    np.testing.assert_array_equal(fast_diagonalization_solve(ops, np.zeros(ops.shape)), 0)


def test_vec_is_column_major():
    U = np.array([[1, 3], [2, 4]])
    np.testing.assert_array_equal(vec(U), [1, 2, 3, 4])
    np.testing.assert_array_equal(unvec(vec(U), U.shape), U)


def test_zero_nonlinearity_jacobian_is_spd():
    ops = tensor_operators(5, SQ)
    J = jacobian_dense(np.zeros(ops.shape), ops, zero())
    K, _ = stiffness_kron(ops)
    np.testing.assert_array_equal(J, K)
    assert np.max(np.abs(J - J.T)) < 1e-13
    assert np.linalg.eigvalsh(J).min() > 0


@pytest.mark.parametrize("N", [3, 5, 6])
def test_kronecker_consistency(N):
    ops = tensor_operators(N, SQ, mass="exact")
    rng = np.random.default_rng(N)
    U = rng.normal(size=ops.shape)
    f = sine_gordon(6)
    n = ops.shape[0] * ops.shape[1]
    cols = [vec(jacobian_apply(U, unvec(e, ops.shape), ops, f)) for e in np.eye(n)]
    np.testing.assert_allclose(jacobian_dense(U, ops, f), np.column_stack(cols), atol=1e-13)


@pytest.mark.parametrize("mass", ["lgl", "exact"])
def test_jacobian_matches_finite_differences(mass):
    ops = tensor_operators(10, SQ, mass=mass)
    rng = np.random.default_rng(7)
    f = cubic()
    for _ in range(5):
        U, V = rng.normal(size=ops.shape), rng.normal(size=ops.shape)
        eps = 1e-6 * (1 + np.abs(U).max())
        fd = (residual(U + eps * V, ops, f) - residual(U - eps * V, ops, f)) / (2 * eps)
        jv = jacobian_apply(U, V, ops, f)
        assert np.linalg.norm(fd - jv) <= 1e-6 * np.linalg.norm(jv)
        np.testing.assert_allclose(vec(jv), jacobian_dense(U, ops, f) @ vec(V), atol=1e-13 * np.abs(jv).max())


def test_jacobian_linear_in_direction():
    ops = tensor_operators(6, SQ)
    U = np.random.default_rng(0).normal(size=ops.shape)
    np.testing.assert_array_equal(jacobian_apply(U, np.zeros(ops.shape), ops, cubic()), 0)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000), N=st.integers(3, 12))
def test_transpose_equivariance(seed, N):
    ops = tensor_operators(N, SQ)
    U = np.random.default_rng(seed).normal(size=ops.shape)
    f = sine_gordon(4)
    np.testing.assert_allclose(residual(U.T, ops, f), residual(U, ops, f).T, atol=1e-12)


def test_shape_errors():
    ops = tensor_operators(6, SQ)
    with pytest.raises(ShapeError):
        residual(np.zeros((4, 4)), ops, cubic())
    with pytest.raises(ShapeError):
        stiffness_kron(tensor_operators(130, SQ))


def test_anisotropic_orders():
    ops = tensor_operators(6, RectDomain(0, 2, 0, 1), Ny=9)
    assert ops.shape == (5, 8)
    R = np.random.default_rng(1).normal(size=ops.shape)
    X = fast_diagonalization_solve(ops, R)
    Ax, Bx, Ay, By = ops.ops_x.A, ops.ops_x.B, ops.ops_y.A, ops.ops_y.B
    np.testing.assert_allclose(Ax @ X @ By + Bx @ X @ Ay, R, atol=1e-10)


def test_solution_json_and_csv(tmp_path):
    ops = tensor_operators(6, SQ)
    U = np.arange(25, dtype=float).reshape(5, 5) / 7
    sol = DiscreteSolution(U, 6, SQ, cubic().describe(), "u_{11}", 1e-12, 4)
    path = sol.save(tmp_path / "s.json")
    back = DiscreteSolution.load(path)
    np.testing.assert_array_equal(back.U, U)
    assert back.seed_label == "u_{11}" and back.N == 6 and back.domain == SQ
    table = np.loadtxt(path.with_suffix(".csv"), delimiter=",", skiprows=1)
    assert table.shape == (49, 3)
    np.testing.assert_array_equal(table[:, 2], sol.full_grid().ravel())
    x, _ = ops.nodes()
    np.testing.assert_allclose(np.unique(table[:, 0]), x, atol=1e-15)
