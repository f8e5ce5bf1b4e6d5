"""Neumann Poisson solve ``-div(eps grad psi) = p - n`` with zero mean."""

from __future__ import annotations

import numpy as np

from .errors import ChargeCompatibilityError, SolverError
from .grid import Grid, face_gradient, integrate


def solve_poisson(g: Grid, n, p) -> np.ndarray:
    """Cell-centred potential with zero boundary flux and zero mean.

    In one dimension the face flux ``-eps D psi`` through the right face
    of cell ``i`` equals the charge ``h * sum(rho[:i+1])`` to its left, so
    the Neumann system is solved exactly by two running sums: one for the
    flux, one for ``psi``.  The last flux is the net charge and must
    vanish; the mean of ``psi`` is subtracted afterwards.

    Raises
    ------
    ChargeCompatibilityError
        If ``|integrate(p - n)|`` exceeds the charge tolerance.
    SolverError
        If the potential is not finite.
    """
    n = np.asarray(n, dtype=float)
    p = np.asarray(p, dtype=float)
    rho = p - n
    tol = 1e-12 * max(integrate(g, n), integrate(g, p), 1.0)
    q = integrate(g, rho)
    if abs(q) > tol:
        raise ChargeCompatibilityError(f"net charge {q:.3e} exceeds tolerance {tol:.1e}")

    flux = g.h * np.cumsum(rho)[:-1]
    dpsi = -flux / g.eps_face
    psi = np.concatenate(([0.0], np.cumsum(g.h * dpsi)))
    if not np.all(np.isfinite(psi)):
        raise SolverError("Poisson solve produced a non-finite potential")
    return psi - psi.mean()


def field_energy(g: Grid, psi) -> float:
    """Discrete Dirichlet energy ``h * sum(eps_face * (D psi)**2)``.

    Note this is the full ``int eps |grad psi|^2`` without the factor 1/2.
    """
    return float(g.h * np.sum(g.eps_face * face_gradient(g, psi) ** 2))


def h1_norm(g: Grid, psi) -> float:
    """Discrete ``||psi||_{H^1} = (||psi||_2^2 + ||D psi||_2^2)**0.5``."""
    psi = np.asarray(psi, dtype=float)
    return float(np.sqrt(integrate(g, psi * psi) + g.h * np.sum(face_gradient(g, psi) ** 2)))
