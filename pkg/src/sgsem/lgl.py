"""Legendre-Gauss-Lobatto machinery on the reference interval [-1, 1].

Nodes and weights, barycentric interpolation, the nodal differentiation
matrix and the exact stiffness/mass matrices of the interior Lagrange basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class InvalidOrderError(ValueError):
    """Polynomial order too small for the requested construction."""


class OutOfDomainError(ValueError):
    """Evaluation point outside the interpolation interval."""


def legendre_and_derivatives(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return P_n(x), P_n'(x) and P_n''(x) by three-term recurrence."""
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev, np.zeros_like(x), np.zeros_like(x)
    p = x.copy()
    dp_prev = np.zeros_like(x)
    dp = np.ones_like(x)
    ddp_prev = np.zeros_like(x)
    ddp = np.zeros_like(x)
    for k in range(1, n):
        p_next = ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
        # derivative recurrences follow from differentiating the one above
        dp_next = dp_prev + (2 * k + 1) * p
        ddp_next = ddp_prev + (2 * k + 1) * dp
        p_prev, p = p, p_next
        dp_prev, dp = dp, dp_next
        ddp_prev, ddp = ddp, ddp_next
    return p, dp, ddp


@dataclass(frozen=True, eq=False)
class Lgl1D:
    """LGL nodes, quadrature weights and barycentric weights of order N."""

    order: int
    nodes: np.ndarray
    weights: np.ndarray
    bary_weights: np.ndarray

    @property
    def interior(self) -> np.ndarray:
        return self.nodes[1:-1]


def _barycentric_weights(x: np.ndarray) -> np.ndarray:
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    w = 1.0 / np.prod(diff, axis=1)
    # rescaling leaves the barycentric formula unchanged and avoids underflow
    return w / np.max(np.abs(w))


@lru_cache(maxsize=64)
def lgl_nodes_weights(N: int) -> Lgl1D:
    """Compute the N+1 LGL points and weights on [-1, 1].

    Interior nodes are the roots of P_N', found by Newton iteration started
    from Chebyshev-Gauss-Lobatto points.
    """
    if N < 1:
        raise InvalidOrderError(f"LGL order must be >= 1, got {N}")
    nodes = np.empty(N + 1)
    nodes[0], nodes[-1] = -1.0, 1.0
    if N > 1:
        x = -np.cos(np.pi * np.arange(1, N) / N)
        for _ in range(100):
            _, dp, ddp = legendre_and_derivatives(N, x)
            dx = dp / ddp
            x = x - dx
            if np.max(np.abs(dx)) < 1e-15:
                break
        # symmetrize: the exact node set is odd-symmetric
        x = 0.5 * (x - x[::-1])
        nodes[1:-1] = x
    p, _, _ = legendre_and_derivatives(N, nodes)
    weights = 2.0 / (N * (N + 1) * p**2)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    bw = _barycentric_weights(nodes)
    bw.setflags(write=False)
    return Lgl1D(order=N, nodes=nodes, weights=weights, bary_weights=bw)


@lru_cache(maxsize=64)
def _differentiation_matrix(N: int) -> np.ndarray:
    lgl = lgl_nodes_weights(N)
    x, w = lgl.nodes, lgl.bary_weights
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    D = (w[None, :] / w[:, None]) / diff
    np.fill_diagonal(D, 0.0)
    # negative-sum trick keeps row sums at exactly zero
    np.fill_diagonal(D, -D.sum(axis=1))
    D.setflags(write=False)
    return D


def differentiation_matrix(lgl: Lgl1D) -> np.ndarray:
    """Nodal differentiation matrix built from barycentric weights.

    ``(D @ v)[j]`` is the derivative at node j of the degree-N interpolant
    of ``v``.
    """
    return _differentiation_matrix(lgl.order)


def lagrange_basis_matrix(lgl: Lgl1D, points) -> np.ndarray:
    """Values of all N+1 Lagrange basis polynomials at ``points``.

    Returns an array of shape (len(points), N+1). Rows for points that
    coincide with a node are exact unit vectors.
    """
    t = np.atleast_1d(np.asarray(points, dtype=float))
    if np.any(t < -1.0) or np.any(t > 1.0) or not np.all(np.isfinite(t)):
        raise OutOfDomainError("interpolation points must lie in [-1, 1]")
    x, w = lgl.nodes, lgl.bary_weights
    diff = t[:, None] - x[None, :]
    exact = diff == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = w[None, :] / diff
        L = terms / terms.sum(axis=1, keepdims=True)
    hit = exact.any(axis=1)
    if hit.any():
        L[hit] = exact[hit].astype(float)
    return L


def evaluate_nodal_polynomial(lgl: Lgl1D, values, points) -> np.ndarray:
    """Evaluate the nodal interpolant of ``values`` at ``points``.

    ``values`` of shape (N+1,) gives a 1D interpolant and ``points`` is a
    sequence of reals. ``values`` of shape (N+1, N+1) is the tensor
    interpolant ``sum_jk V[j, k] h_j(x) h_k(y)`` and ``points`` is an array
    of (x, y) pairs.
    """
    values = np.asarray(values, dtype=float)
    n = lgl.order + 1
    if values.ndim == 1:
        if values.shape != (n,):
            raise ValueError(f"expected {n} nodal values, got {values.shape}")
        return lagrange_basis_matrix(lgl, points) @ values
    if values.shape != (n, n):
        raise ValueError(f"expected ({n}, {n}) nodal values, got {values.shape}")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != 2:
        raise ValueError("2D evaluation needs points of shape (k, 2)")
    Lx = lagrange_basis_matrix(lgl, pts[:, 0])
    Ly = lagrange_basis_matrix(lgl, pts[:, 1])
    return np.einsum("pj,jk,pk->p", Lx, values, Ly)


@dataclass(frozen=True, eq=False)
class SpectralOperators1D:
    """Differentiation matrix plus interior stiffness ``A`` and mass ``B``.

    ``B`` is the exact mass matrix; ``B_lgl`` is its LGL-quadrature
    counterpart ``diag(weights)`` on the interior nodes.
    """

    lgl: Lgl1D
    D: np.ndarray
    A: np.ndarray
    B: np.ndarray
    B_lgl: np.ndarray


@lru_cache(maxsize=64)
def _stiffness_mass(N: int) -> tuple[np.ndarray, np.ndarray]:
    lgl = lgl_nodes_weights(N)
    D = _differentiation_matrix(N)
    # h_j h_k has degree 2N: an (N+1)-point Gauss rule is exact to 2N+1
    g, gw = np.polynomial.legendre.leggauss(N + 1)
    H = lagrange_basis_matrix(lgl, g)[:, 1:-1]
    dH = (lagrange_basis_matrix(lgl, g) @ D)[:, 1:-1]
    A = dH.T @ (gw[:, None] * dH)
    B = H.T @ (gw[:, None] * H)
    A = 0.5 * (A + A.T)
    B = 0.5 * (B + B.T)
    A.setflags(write=False)
    B.setflags(write=False)
    return A, B


def assemble_stiffness_mass(lgl: Lgl1D) -> SpectralOperators1D:
    """Exact stiffness and mass matrices for the interior nodal basis on [-1, 1]."""
    if lgl.order < 2:
        raise InvalidOrderError("stiffness/mass need N >= 2 (no interior nodes)")
    A, B = _stiffness_mass(lgl.order)
    B_lgl = np.diag(lgl.weights[1:-1])
    B_lgl.setflags(write=False)
    return SpectralOperators1D(lgl=lgl, D=differentiation_matrix(lgl), A=A, B=B, B_lgl=B_lgl)
