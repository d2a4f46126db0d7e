"""Damped Newton iteration and parameter continuation for the discrete system."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.sparse.linalg as spla

from .discretization import (
    DiscreteSolution,
    TensorOperators,
    _check,
    fast_diagonalization_solve,
    jacobian_apply,
    jacobian_dense,
    residual,
    unvec,
    vec,
)
from .nonlinearity import Nonlinearity

log = logging.getLogger(__name__)

DENSE_LU_MAX_N = 64
PIVOT_TOL = 1e-14


class NewtonError(RuntimeError):
    pass


class NonConvergenceError(NewtonError):
    def __init__(self, message, last_iterate=None, history=None, parameter=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.history = history or []
        self.parameter = parameter


class SingularJacobianError(NewtonError):
    def __init__(self, message, last_iterate=None, history=None, parameter=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.history = history or []
        self.parameter = parameter


@dataclass(frozen=True)
class NewtonConfig:
    tol: float = 1e-10
    max_iters: int = 100
    max_halvings: int = 30
    continuation: tuple[float, ...] | None = None
    linear_rtol: float = 1e-12
    # Newton steps taken even when the starting residual already meets tol
    min_iters: int = 0

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.max_halvings < 0:
            raise ValueError("max_halvings must be >= 0")


def _newton_step(U, R, ops: TensorOperators, f: Nonlinearity, cfg: NewtonConfig) -> np.ndarray:
    """Solve J(U) dU = -R."""
    if max(ops.ops_x.N, ops.ops_y.N) <= DENSE_LU_MAX_N:
        J = jacobian_dense(U, ops, f)
        lu, piv = scipy.linalg.lu_factor(J, check_finite=False)
        d = np.abs(np.diag(lu))
        if d.min() < PIVOT_TOL * max(d.max(), 1.0):
            raise SingularJacobianError("Jacobian is numerically singular")
        return unvec(scipy.linalg.lu_solve((lu, piv), -vec(R)), U.shape)

    shape = U.shape
    n = shape[0] * shape[1]
    fprime = f.f_prime(U)
    Ax, Bx, Ay, By = ops.ops_x.A, ops.ops_x.B, ops.ops_y.A, ops.ops_y.B

    def matvec(v):
        V = unvec(v, shape)
        return vec(Ax @ V @ By + Bx @ V @ Ay - Bx @ (fprime * V) @ By)

    def precond(v):
        return vec(fast_diagonalization_solve(ops, unvec(v, shape)))

    J = spla.LinearOperator((n, n), matvec=matvec, dtype=float)
    P = spla.LinearOperator((n, n), matvec=precond, dtype=float)
    b = -vec(R)
    x, info = spla.gmres(J, b, M=P, rtol=cfg.linear_rtol, atol=0.0, restart=100, maxiter=50)
    if info != 0:
        rel = np.linalg.norm(matvec(x) - b) / max(np.linalg.norm(b), 1e-300)
        if not rel < 1e-6:
            raise SingularJacobianError(f"Krylov solve failed (info={info}, rel. residual {rel:.2e})")
    return unvec(x, shape)


def newton_solve(
    U0,
    ops: TensorOperators,
    f: Nonlinearity,
    cfg: NewtonConfig = NewtonConfig(),
    seed_label: str = "",
) -> DiscreteSolution:
    """Damped Newton on ``A U B + B U A - B F(U) B = 0``.

    A step is halved (up to ``cfg.max_halvings`` times) until the Euclidean
    norm of the residual decreases. Stops once that norm is below ``cfg.tol``.
    """
    U = np.array(_check(U0, ops), dtype=float)
    R = residual(U, ops, f)
    rn = float(np.linalg.norm(R))
    history = [(0, rn, 0)]
    it = 0
    while rn >= cfg.tol or it < cfg.min_iters:
        if it >= cfg.max_iters:
            raise NonConvergenceError(
                f"no convergence in {cfg.max_iters} iterations (residual {rn:.3e})", U, history
            )
        try:
            dU = _newton_step(U, R, ops, f, cfg)
        except SingularJacobianError as exc:
            exc.last_iterate, exc.history = U, history
            raise
        t = 1.0
        for halvings in range(cfg.max_halvings + 1):
            U_new = U + t * dU
            R_new = residual(U_new, ops, f)
            rn_new = float(np.linalg.norm(R_new))
            if rn_new < rn:
                break
            t *= 0.5
        else:
            raise NonConvergenceError(
                f"line search failed after {cfg.max_halvings} halvings (residual {rn:.3e})",
                U, history,
            )
        it += 1
        U, R, rn = U_new, R_new, rn_new
        history.append((it, rn, halvings))
        log.debug("newton %d: residual %.3e (%d halvings)", it, rn, halvings)
    return DiscreteSolution(
        U=U,
        N=ops.N,
        domain=ops.domain,
        nonlinearity=f.describe(),
        seed_label=seed_label,
        residual_norm=rn,
        newton_iters=it,
        history=history,
    )


def continuation_solve(
    U0,
    ops: TensorOperators,
    f: Nonlinearity,
    cfg: NewtonConfig,
    path: Sequence[float] | None = None,
    seed_label: str = "",
) -> list[DiscreteSolution]:
    """Solve along a parameter path, warm-starting each solve from the previous one."""
    path = tuple(path if path is not None else (cfg.continuation or ()))
    if not path:
        raise ValueError("continuation needs a non-empty parameter path")
    chain = []
    U = U0
    for value in path:
        g = f.with_parameter(value)
        try:
            sol = newton_solve(U, ops, g, cfg, seed_label=seed_label)
        except NewtonError as exc:
            exc.parameter = value
            exc.args = (f"{exc.args[0]} at parameter {value}",)
            raise
        chain.append(sol)
        U = sol.U
    return chain


def write_history_csv(history, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iteration", "residual_norm", "halvings"])
        for it, rn, h in history:
            w.writerow([it, repr(float(rn)), h])
    return path
