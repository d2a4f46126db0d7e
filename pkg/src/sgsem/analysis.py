"""Error norms, convergence studies, classification and field export."""

from __future__ import annotations

import csv
import enum
import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .discretization import DiscreteSolution, tensor_operators
from .eigen import DomainError, RectDomain
from .lgl import differentiation_matrix, lagrange_basis_matrix, lgl_nodes_weights
from .newton import NewtonConfig, NewtonError, newton_solve
from .nonlinearity import Nonlinearity
from .seeds import SeedGuess, seed_to_nodal

log = logging.getLogger(__name__)

ROUNDING_FLOOR = 1e-13


class SolutionMismatchError(ValueError):
    pass


def interpolate_to_grid(sol: DiscreteSolution, N_target: int) -> np.ndarray:
    """Values of the degree-N interpolant of ``sol`` on the full order-``N_target`` LGL grid."""
    src = lgl_nodes_weights(sol.N)
    dst = lgl_nodes_weights(N_target).nodes
    L = lagrange_basis_matrix(src, dst)
    return L @ sol.full_grid() @ L.T


def restrict_to_interior(sol: DiscreteSolution, N_target: int) -> np.ndarray:
    return interpolate_to_grid(sol, N_target)[1:-1, 1:-1]


def grid_norms(diff_full: np.ndarray, N: int, domain: RectDomain) -> tuple[float, float]:
    """L2 norm and H1 seminorm of a nodal field on the order-N LGL grid."""
    lgl = lgl_nodes_weights(N)
    wx = lgl.weights * domain.lx / 2
    wy = lgl.weights * domain.ly / 2
    W = np.outer(wx, wy)
    D = differentiation_matrix(lgl)
    dx = (2.0 / domain.lx) * (D @ diff_full)
    dy = (2.0 / domain.ly) * (diff_full @ D.T)
    l2 = math.sqrt(max(float(np.sum(W * diff_full**2)), 0.0))
    semi = math.sqrt(max(float(np.sum(W * (dx**2 + dy**2))), 0.0))
    return l2, semi


def error_norms(sol: DiscreteSolution, ref: DiscreteSolution) -> tuple[float, float]:
    """(L2, H1) norms of ``sol - ref`` evaluated on the reference grid."""
    if sol.domain != ref.domain:
        raise SolutionMismatchError("solutions live on different domains")
    if sol.nonlinearity != ref.nonlinearity:
        raise SolutionMismatchError("solutions solve different problems")
    if ref.N < sol.N:
        raise SolutionMismatchError("reference order must not be below the solution order")
    diff = interpolate_to_grid(sol, ref.N) - ref.full_grid()
    l2, semi = grid_norms(diff, ref.N, ref.domain)
    return l2, math.sqrt(l2**2 + semi**2)


@dataclass(frozen=True)
class ConvergenceRecord:
    N: int
    l2_error: float
    h1_error: float
    seed_label: str
    reference_N: int
    converged: bool = True

    @property
    def at_floor(self) -> bool:
        return self.converged and self.l2_error < ROUNDING_FLOOR


def reference_solution(
    seed: SeedGuess,
    f: Nonlinearity,
    reference_N: int = 100,
    warm_N: int = 48,
    domain: RectDomain | None = None,
    cfg: NewtonConfig = NewtonConfig(),
    mass: str = "lgl",
) -> DiscreteSolution:
    """High-order solve, warm-started from the converged order-``warm_N`` solution."""
    domain = domain or seed.basis[0].domain
    warm_N = min(warm_N, reference_N)
    coarse = newton_solve(seed_to_nodal(seed, warm_N, domain),
                          tensor_operators(warm_N, domain, mass), f, cfg, seed_label=seed.label)
    if warm_N == reference_N:
        return coarse
    U0 = restrict_to_interior(coarse, reference_N)
    # the interpolated warm start can already pass tol; polish it regardless
    polish = replace(cfg, min_iters=max(cfg.min_iters, 1))
    return newton_solve(U0, tensor_operators(reference_N, domain, mass), f, polish,
                        seed_label=seed.label)


def convergence_study(
    seed: SeedGuess,
    N_list: Sequence[int],
    reference_N: int,
    f: Nonlinearity,
    domain: RectDomain | None = None,
    cfg: NewtonConfig = NewtonConfig(),
    reference: DiscreteSolution | None = None,
    mass: str = "lgl",
) -> list[ConvergenceRecord]:
    """Errors of the order-N solutions started from ``seed`` against an order-``reference_N`` one.

    Failed solves appear as records with ``converged=False`` and NaN errors.
    """
    N_list = list(N_list)
    if not N_list:
        raise ValueError("N_list is empty")
    if reference_N <= max(N_list):
        raise ValueError("reference_N must exceed every N in N_list")
    domain = domain or seed.basis[0].domain
    if reference is None:
        reference = reference_solution(seed, f, reference_N, min(48, reference_N), domain, cfg, mass)
    records = []
    for N in N_list:
        try:
            sol = newton_solve(seed_to_nodal(seed, N, domain), tensor_operators(N, domain, mass),
                               f, cfg, seed_label=seed.label)
        except NewtonError as exc:
            log.warning("N=%d solve failed: %s", N, exc)
            records.append(ConvergenceRecord(N, math.nan, math.nan, seed.label, reference_N, False))
            continue
        l2, h1 = error_norms(sol, reference)
        records.append(ConvergenceRecord(N, l2, h1, seed.label, reference_N))
    return records


def log_slope(records: Sequence[ConvergenceRecord]) -> float:
    """Least-squares slope of log10(L2 error) against N."""
    pts = [(r.N, math.log10(r.l2_error)) for r in records if r.converged and r.l2_error > 0]
    n, e = np.array(pts).T
    return float(np.polyfit(n, e, 1)[0])


def write_convergence_csv(records, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["N", "l2", "h1", "converged"])
        for r in records:
            w.writerow([r.N, repr(r.l2_error), repr(r.h1_error), int(r.converged)])
    return path


def format_convergence_table(records) -> str:
    """Plain-text table: one column per N, rows for the L2 and H1 errors."""

    def cell(r, v):
        if not r.converged:
            return "failed"
        return f"{v:.4E}"

    head = ["N"] + [str(r.N) for r in records]
    l2 = ["||u-u_N||_L2"] + [cell(r, r.l2_error) for r in records]
    h1 = ["||u-u_N||_H1"] + [cell(r, r.h1_error) for r in records]
    widths = [max(len(row[i]) for row in (head, l2, h1)) for i in range(len(head))]
    lines = ["  ".join(c.rjust(wd) for c, wd in zip(row, widths)) for row in (head, l2, h1)]
    if any(r.at_floor for r in records):
        lines.append(f"(entries below {ROUNDING_FLOOR:.0e} are at the rounding floor)")
    return "\n".join(lines) + "\n"


class Sign(str, enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    SIGN_CHANGING = "sign-changing"
    ZERO = "zero"


@dataclass(frozen=True)
class SolutionClass:
    sign: Sign
    max_abs: float
    num_peaks: int


def classify(sol: DiscreteSolution | np.ndarray, tol: float = 1e-12) -> SolutionClass:
    """Sign pattern and number of strict 8-neighbour local maxima of |u|."""
    U = sol.U if isinstance(sol, DiscreteSolution) else np.asarray(sol, dtype=float)
    max_abs = float(np.max(np.abs(U))) if U.size else 0.0
    if max_abs <= tol:
        return SolutionClass(Sign.ZERO, max_abs, 0)
    if np.all(U > tol):
        sign = Sign.POSITIVE
    elif np.all(U < -tol):
        sign = Sign.NEGATIVE
    else:
        sign = Sign.SIGN_CHANGING
    # boundary ring of zeros (Dirichlet) surrounds the interior values
    A = np.pad(np.abs(U), 1)
    centre = A[1:-1, 1:-1]
    is_peak = centre > tol
    n1, n2 = U.shape
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            is_peak &= centre > A[1 + di:1 + di + n1, 1 + dj:1 + dj + n2]
    return SolutionClass(sign, max_abs, int(is_peak.sum()))


def evaluate_solution(sol: DiscreteSolution, x, y) -> np.ndarray:
    """Evaluate the polynomial solution at physical points (x, y)."""
    if not np.all(sol.domain.contains(x, y)):
        raise DomainError("evaluation point outside the rectangle")
    xi, eta = sol.domain.to_reference(x, y)
    # absorb rounding at the edges of the mapped interval
    xi = np.clip(np.atleast_1d(xi), -1.0, 1.0)
    eta = np.clip(np.atleast_1d(eta), -1.0, 1.0)
    lgl = lgl_nodes_weights(sol.N)
    Lx = lagrange_basis_matrix(lgl, xi)
    Ly = lagrange_basis_matrix(lgl, eta)
    return np.einsum("pj,jk,pk->p", Lx, sol.full_grid(), Ly)


def export_field(sol: DiscreteSolution, resolution: int, path) -> Path:
    """Write u on a uniform ``resolution x resolution`` grid as CSV (x, y, u)."""
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    d = sol.domain
    xs = np.linspace(d.x_lo, d.x_hi, resolution)
    ys = np.linspace(d.y_lo, d.y_hi, resolution)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    u = evaluate_solution(sol, X.ravel(), Y.ravel())
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            fh.write(f"# N={sol.N} seed_label={sol.seed_label} "
                     f"residual_norm={sol.residual_norm:.6e}\n")
            w = csv.writer(fh)
            w.writerow(["x", "y", "u"])
            for row in zip(X.ravel(), Y.ravel(), u):
                w.writerow([repr(float(v)) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write field file {path}: {exc}") from exc
    return path


def read_field(path) -> tuple[dict, np.ndarray]:
    """Read a file written by :func:`export_field`; returns (metadata, array of x, y, u)."""
    with Path(path).open() as fh:
        header = fh.readline().lstrip("# ").split()
        meta = dict(item.split("=", 1) for item in header)
        data = np.loadtxt(fh, delimiter=",", skiprows=1, ndmin=2)
    return meta, data
