"""Dirichlet Laplacian eigenpairs on a rectangle."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class Normalization(str, enum.Enum):
    """Scaling of ``sin(m x') sin(n y')`` eigenfunctions.

    ``ORTHONORMAL`` has unit L2 norm on the physical rectangle;
    ``UNIT_AMPLITUDE`` has maximum value 1.
    """

    ORTHONORMAL = "orthonormal"
    UNIT_AMPLITUDE = "unit-amplitude"


class DomainError(ValueError):
    """Degenerate rectangle or point outside it."""


@dataclass(frozen=True)
class RectDomain:
    x_lo: float = 0.0
    x_hi: float = math.pi
    y_lo: float = 0.0
    y_hi: float = math.pi

    def __post_init__(self):
        vals = (self.x_lo, self.x_hi, self.y_lo, self.y_hi)
        if not all(math.isfinite(v) for v in vals):
            raise DomainError(f"non-finite rectangle bounds {vals}")
        if not (self.x_lo < self.x_hi and self.y_lo < self.y_hi):
            raise DomainError(f"degenerate rectangle {vals}")

    @property
    def lx(self) -> float:
        return self.x_hi - self.x_lo

    @property
    def ly(self) -> float:
        return self.y_hi - self.y_lo

    @property
    def area(self) -> float:
        return self.lx * self.ly

    def from_reference(self, xi, eta):
        """Map reference coordinates in [-1, 1]^2 to the rectangle."""
        x = self.x_lo + 0.5 * (np.asarray(xi, dtype=float) + 1.0) * self.lx
        y = self.y_lo + 0.5 * (np.asarray(eta, dtype=float) + 1.0) * self.ly
        return x, y

    def to_reference(self, x, y):
        xi = 2.0 * (np.asarray(x, dtype=float) - self.x_lo) / self.lx - 1.0
        eta = 2.0 * (np.asarray(y, dtype=float) - self.y_lo) / self.ly - 1.0
        return xi, eta

    def contains(self, x, y, tol: float = 1e-12) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        sx, sy = tol * max(1.0, self.lx), tol * max(1.0, self.ly)
        return (
            (x >= self.x_lo - sx) & (x <= self.x_hi + sx)
            & (y >= self.y_lo - sy) & (y <= self.y_hi + sy)
        )

    def to_dict(self) -> dict:
        return {"x_lo": self.x_lo, "x_hi": self.x_hi, "y_lo": self.y_lo, "y_hi": self.y_hi}


@dataclass(frozen=True)
class EigenPair:
    m: int
    n: int
    lam: float
    domain: RectDomain = RectDomain()
    normalization: Normalization = Normalization.ORTHONORMAL

    def with_normalization(self, normalization: Normalization | str) -> "EigenPair":
        return EigenPair(self.m, self.n, self.lam, self.domain, Normalization(normalization))

    @property
    def scale(self) -> float:
        if self.normalization is Normalization.ORTHONORMAL:
            return 2.0 / math.sqrt(self.domain.area)
        return 1.0


@dataclass(frozen=True)
class EigenGroup:
    lam: float
    members: tuple[tuple[int, int], ...]

    @property
    def multiplicity(self) -> int:
        return len(self.members)


def eigenvalue(m: int, n: int, domain: RectDomain) -> float:
    # integer eigenvalues on (0, pi)^2 are kept exact for tie detection
    if domain.lx == math.pi and domain.ly == math.pi:
        return float(m * m + n * n)
    return (m * math.pi / domain.lx) ** 2 + (n * math.pi / domain.ly) ** 2


def _same(a: float, b: float) -> bool:
    if a == b:
        return True
    if float(a).is_integer() and float(b).is_integer():
        return False
    return abs(a - b) <= 1e-12 * max(abs(a), abs(b))


def laplace_eigenpairs(
    domain: RectDomain,
    count: int,
    normalization: Normalization | str = Normalization.ORTHONORMAL,
) -> list[EigenPair]:
    """First ``count`` Dirichlet eigenpairs of -Laplace, ascending.

    Within a degenerate eigenvalue the pair with the larger ``m`` comes
    first, so on (0, pi)^2 the sequence starts (1,1), (2,1), (1,2), (2,2).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    normalization = Normalization(normalization)
    # any eigenvalue among the first `count` has m, n <= bound below
    kmax = 1
    while True:
        cands = [(eigenvalue(m, n, domain), m, n)
                 for m in range(1, kmax + 1) for n in range(1, kmax + 1)]
        cands.sort(key=lambda t: (t[0], -t[1], t[2]))
        if len(cands) >= count:
            cutoff = cands[count - 1][0]
            edge = min(eigenvalue(kmax + 1, 1, domain), eigenvalue(1, kmax + 1, domain))
            if edge > cutoff and not _same(edge, cutoff):
                break
        kmax *= 2
    # re-sort with tolerant ties so near-equal floats group as equal
    ordered: list[tuple[float, int, int]] = []
    for lam, m, n in cands:
        if ordered and _same(lam, ordered[-1][0]):
            lam = ordered[-1][0]
        ordered.append((lam, m, n))
    ordered.sort(key=lambda t: (t[0], -t[1], t[2]))
    return [EigenPair(m, n, lam, domain, normalization) for lam, m, n in ordered[:count]]


def group_by_multiplicity(pairs: list[EigenPair]) -> list[EigenGroup]:
    """Partition pairs into groups of equal eigenvalue, members sorted by (m, n)."""
    groups: list[list] = []
    for p in pairs:
        for g in groups:
            if _same(g[0], p.lam):
                g[1].append((p.m, p.n))
                break
        else:
            groups.append([p.lam, [(p.m, p.n)]])
    groups.sort(key=lambda g: g[0])
    return [EigenGroup(lam, tuple(sorted(mem))) for lam, mem in groups]


def eigen_group(lam: float, domain: RectDomain = RectDomain()) -> EigenGroup:
    """Full multiplicity group of the eigenvalue ``lam`` (exact membership)."""
    count = 1
    while True:
        pairs = laplace_eigenpairs(domain, count)
        top = pairs[-1].lam
        if top > lam and not _same(top, lam):
            break
        count *= 2
    for g in group_by_multiplicity(pairs):
        if _same(g.lam, lam):
            return g
    raise ValueError(f"{lam} is not a Dirichlet eigenvalue of {domain}")


def eigenfunction_values(pair: EigenPair, x, y) -> np.ndarray:
    """Evaluate the eigenfunction of ``pair`` at physical points (x, y)."""
    d = pair.domain
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if not np.all(d.contains(x, y)):
        raise DomainError("eigenfunction evaluated outside the rectangle")
    sx = np.sin(pair.m * math.pi * (x - d.x_lo) / d.lx)
    sy = np.sin(pair.n * math.pi * (y - d.y_lo) / d.ly)
    return pair.scale * sx * sy
