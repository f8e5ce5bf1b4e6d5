"""Uniform cell-centred finite-volume mesh on [0, L].

Cell fields have length ``N``; face fields live on the ``N - 1`` interior
faces.  Boundary faces carry zero flux and are never stored.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True, eq=False)
class Grid:
    L: float
    N: int
    eps: np.ndarray = field(default=1.0)

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError(f"domain length must be positive, got {self.L}")
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"need an integer N >= 2, got {self.N}")
        eps = np.asarray(self.eps, dtype=float)
        if eps.ndim == 0:
            eps = np.full(int(self.N), float(eps))
        if eps.shape != (self.N,):
            raise ValueError(f"eps must be scalar or have length N={self.N}, got {eps.shape}")
        if np.any(~(eps > 0)):
            raise ValueError("permittivity must be strictly positive")
        eps.setflags(write=False)
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "L", float(self.L))
        object.__setattr__(self, "eps", eps)

    @property
    def h(self) -> float:
        return self.L / self.N

    @property
    def volume(self) -> float:
        return self.L

    @property
    def x(self) -> np.ndarray:
        """Cell centres."""
        return (np.arange(self.N) + 0.5) * self.h

    @property
    def x_faces(self) -> np.ndarray:
        """Interior face positions."""
        return np.arange(1, self.N) * self.h

    @property
    def eps_min(self) -> float:
        return float(self.eps.min())

    @property
    def eps_max(self) -> float:
        return float(self.eps.max())

    @property
    def eps_face(self) -> np.ndarray:
        """Harmonic mean of the permittivity of the two adjacent cells."""
        e = self.eps
        return 2.0 * e[:-1] * e[1:] / (e[:-1] + e[1:])

    def refined(self, factor: int = 2) -> "Grid":
        """Same domain with ``factor`` times more cells (eps repeated per cell)."""
        return Grid(self.L, self.N * factor, np.repeat(self.eps, factor))


def _check_cells(g: Grid, f) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape != (g.N,):
        raise ValueError(f"expected a cell field of length {g.N}, got shape {f.shape}")
    return f


def _check_faces(g: Grid, j) -> np.ndarray:
    j = np.asarray(j, dtype=float)
    if j.shape != (g.N - 1,):
        raise ValueError(f"expected a face field of length {g.N - 1}, got shape {j.shape}")
    return j


def face_gradient(g: Grid, f) -> np.ndarray:
    f = _check_cells(g, f)
    return np.diff(f) / g.h


def face_average(g: Grid, f) -> np.ndarray:
    """Arithmetic mean of the two cells adjacent to each interior face."""
    f = _check_cells(g, f)
    return 0.5 * (f[:-1] + f[1:])


def divergence_of_face_flux(g: Grid, j) -> np.ndarray:
    """``(j[i] - j[i-1]) / h`` with zero flux through both boundary faces."""
    j = _check_faces(g, j)
    padded = np.concatenate(([0.0], j, [0.0]))
    return np.diff(padded) / g.h


def face_to_cells(g: Grid, q) -> np.ndarray:
    """Split each face value half-and-half onto its two neighbouring cells.

    Preserves the total: ``integrate(face_to_cells(q)) == h * sum(q)``.
    """
    q = _check_faces(g, q)
    out = np.zeros(g.N)
    out[:-1] += 0.5 * q
    out[1:] += 0.5 * q
    return out


def integrate(g: Grid, f) -> float:
    """Midpoint rule ``h * sum(f)``."""
    f = _check_cells(g, f)
    return float(g.h * np.sum(f))


def integrate_faces(g: Grid, q) -> float:
    """``h * sum(q)`` over interior faces."""
    q = _check_faces(g, q)
    return float(g.h * np.sum(q))


def poincare_constant(g: Grid) -> float:
    """Optimal Neumann Poincare constant ``(L / pi)**2`` of the interval."""
    return (g.L / np.pi) ** 2
