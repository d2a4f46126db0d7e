"""Interpolated-coefficient Legendre-Galerkin system on a rectangle.

Unknowns are the interior nodal values ``U[j, k] = u(x_j, y_k)`` on the tensor
LGL grid, with ``j`` running along x. The discrete equations are

    A_x U B_y + B_x U A_y - B_x F(U) B_y = 0,    F(U) = f(U) elementwise,

and the column-major vectorization ``vec(U)`` turns them into
``K u - M f(u) = 0`` with ``K = B_y (x) A_x + A_y (x) B_x`` and
``M = B_y (x) B_x``.

Two mass matrices are available: ``"lgl"`` (default) integrates ``h_j h_k``
with the LGL rule and is diagonal, ``"exact"`` integrates it exactly. The
stiffness matrix is exact either way.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg

from .eigen import RectDomain
from .lgl import SpectralOperators1D, assemble_stiffness_mass, lgl_nodes_weights
from .nonlinearity import Nonlinearity

DENSE_LIMIT = 128
MASS_KINDS = ("lgl", "exact")


class ShapeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ScaledOperators1D:
    """1D operators mapped to an interval of length ``length``."""

    base: SpectralOperators1D
    length: float
    mass: str
    A: np.ndarray
    B: np.ndarray
    # generalized eigenpairs A Z = B Z diag(evals), Z^T B Z = I
    evals: np.ndarray
    Z: np.ndarray

    @property
    def N(self) -> int:
        return self.base.lgl.order


def scale_operators(base: SpectralOperators1D, length: float, mass: str = "lgl") -> ScaledOperators1D:
    if mass not in MASS_KINDS:
        raise ValueError(f"mass must be one of {MASS_KINDS}, got {mass!r}")
    A = base.A * (2.0 / length)
    B = (base.B_lgl if mass == "lgl" else base.B) * (length / 2.0)
    try:
        evals, Z = scipy.linalg.eigh(A, B)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"generalized eigendecomposition failed: {exc}") from exc
    for arr in (A, B, evals, Z):
        arr.setflags(write=False)
    return ScaledOperators1D(base, length, mass, A, B, evals, Z)


@dataclass(frozen=True, eq=False)
class TensorOperators:
    ops_x: ScaledOperators1D
    ops_y: ScaledOperators1D
    domain: RectDomain

    @property
    def N(self) -> int:
        return self.ops_x.N

    @property
    def mass(self) -> str:
        return self.ops_x.mass

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ops_x.N - 1, self.ops_y.N - 1)

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        """Physical coordinates of the full (boundary-inclusive) LGL grid."""
        return self.domain.from_reference(self.ops_x.base.lgl.nodes, self.ops_y.base.lgl.nodes)

    def interior_nodes(self) -> tuple[np.ndarray, np.ndarray]:
        x, y = self.nodes()
        return x[1:-1], y[1:-1]


def tensor_operators(
    N: int,
    domain: RectDomain = RectDomain(),
    mass: str = "lgl",
    Ny: int | None = None,
) -> TensorOperators:
    """Assemble scaled operators for order ``N`` (and optionally ``Ny`` along y)."""
    Ny = N if Ny is None else Ny
    bx = assemble_stiffness_mass(lgl_nodes_weights(N))
    by = bx if Ny == N else assemble_stiffness_mass(lgl_nodes_weights(Ny))
    ox = scale_operators(bx, domain.lx, mass)
    oy = ox if (Ny == N and domain.ly == domain.lx) else scale_operators(by, domain.ly, mass)
    return TensorOperators(ox, oy, domain)


def _check(U, ops: TensorOperators) -> np.ndarray:
    U = np.asarray(U, dtype=float)
    if U.shape != ops.shape:
        raise ShapeError(f"expected shape {ops.shape}, got {U.shape}")
    return U


def residual(U, ops: TensorOperators, f: Nonlinearity) -> np.ndarray:
    U = _check(U, ops)
    Ax, Bx, Ay, By = ops.ops_x.A, ops.ops_x.B, ops.ops_y.A, ops.ops_y.B
    return Ax @ U @ By + Bx @ U @ Ay - Bx @ f.f(U) @ By


def jacobian_apply(U, V, ops: TensorOperators, f: Nonlinearity) -> np.ndarray:
    """Matrix-free Jacobian action ``A V B + B V A - B (f'(U) * V) B``."""
    U = _check(U, ops)
    V = _check(V, ops)
    Ax, Bx, Ay, By = ops.ops_x.A, ops.ops_x.B, ops.ops_y.A, ops.ops_y.B
    return Ax @ V @ By + Bx @ V @ Ay - Bx @ (f.f_prime(U) * V) @ By


def vec(U) -> np.ndarray:
    """Column-major vectorization: U[0,0], U[1,0], ..., U[0,1], ..."""
    return np.asarray(U).ravel(order="F")


def unvec(u, shape) -> np.ndarray:
    return np.asarray(u).reshape(shape, order="F")


def stiffness_kron(ops: TensorOperators) -> tuple[np.ndarray, np.ndarray]:
    """Dense ``K`` and ``M`` in the column-major ordering."""
    if max(ops.ops_x.N, ops.ops_y.N) > DENSE_LIMIT:
        raise ShapeError(f"dense assembly limited to N <= {DENSE_LIMIT}")
    Ax, Bx, Ay, By = ops.ops_x.A, ops.ops_x.B, ops.ops_y.A, ops.ops_y.B
    K = np.kron(By, Ax) + np.kron(Ay, Bx)
    M = np.kron(By, Bx)
    return K, M


def jacobian_dense(U, ops: TensorOperators, f: Nonlinearity) -> np.ndarray:
    """Explicit ``K - M diag(f'(vec U))``."""
    U = _check(U, ops)
    K, M = stiffness_kron(ops)
    return K - M * vec(f.f_prime(U))[None, :]


def fast_diagonalization_solve(ops: TensorOperators, rhs) -> np.ndarray:
    """Solve ``A_x X B_y + B_x X A_y = rhs`` in O(N^3)."""
    rhs = _check(rhs, ops)
    Zx, Zy = ops.ops_x.Z, ops.ops_y.Z
    denom = ops.ops_x.evals[:, None] + ops.ops_y.evals[None, :]
    return Zx @ ((Zx.T @ rhs @ Zy) / denom) @ Zy.T


@dataclass(eq=False)
class DiscreteSolution:
    U: np.ndarray
    N: int
    domain: RectDomain
    nonlinearity: dict
    seed_label: str = ""
    residual_norm: float = float("nan")
    newton_iters: int = 0
    history: list = field(default_factory=list)

    def full_grid(self) -> np.ndarray:
        """Nodal values including the zero boundary rows/columns."""
        n1, n2 = self.U.shape
        out = np.zeros((n1 + 2, n2 + 2))
        out[1:-1, 1:-1] = self.U
        return out

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "domain": self.domain.to_dict(),
            "nonlinearity": self.nonlinearity,
            "seed_label": self.seed_label,
            "residual_norm": float(self.residual_norm),
            "newton_iters": int(self.newton_iters),
            "shape": list(self.U.shape),
            # row-major: index j (x) outer, k (y) inner
            "U": [float(v) for v in self.U.ravel(order="C")],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DiscreteSolution":
        shape = tuple(d["shape"])
        return cls(
            U=np.asarray(d["U"], dtype=float).reshape(shape),
            N=int(d["N"]),
            domain=RectDomain(**d["domain"]),
            nonlinearity=dict(d["nonlinearity"]),
            seed_label=d.get("seed_label", ""),
            residual_norm=float(d["residual_norm"]),
            newton_iters=int(d.get("newton_iters", 0)),
        )

    def save(self, path) -> Path:
        """Write JSON plus a sidecar ``.csv`` of (x, y, u) on the nodal grid."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_dict(), indent=1))
        xi = lgl_nodes_weights(self.N).nodes
        x, y = self.domain.from_reference(xi, xi)
        X, Y = np.meshgrid(x, y, indexing="ij")
        table = np.column_stack([X.ravel(), Y.ravel(), self.full_grid().ravel()])
        np.savetxt(path.with_suffix(".csv"), table, delimiter=",", header="x,y,u",
                   comments="", fmt="%.17g")
        return path

    @classmethod
    def load(cls, path) -> "DiscreteSolution":
        return cls.from_dict(json.loads(Path(path).read_text()))
