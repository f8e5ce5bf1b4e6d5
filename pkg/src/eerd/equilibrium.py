"""Closed-form equilibrium selected by the conserved energy and charge.

Without doping and with no-flux boundaries the equilibrium is spatially
constant with vanishing potential, ``n = p = w(u_inf)`` and
``u_inf = E0 / |Omega|``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ChargeCompatibilityError, DomainError
from .grid import Grid
from .model import ModelFunctions, eval_sigma, eval_w
from .state import State


@dataclass(frozen=True)
class Equilibrium:
    u_inf: float
    n_inf: float
    p_inf: float
    theta_inf: float
    E0: float
    psi_inf: float = 0.0
    kappa: float = 0.0

    @property
    def eta(self) -> float:
        """Energy multiplier, the inverse equilibrium temperature."""
        return 1.0 / self.theta_inf

    def to_dict(self) -> dict:
        return {
            "u_inf": self.u_inf,
            "n_inf": self.n_inf,
            "p_inf": self.p_inf,
            "theta_inf": self.theta_inf,
            "psi_inf": self.psi_inf,
            "eta": self.eta,
            "kappa": self.kappa,
            "E0": self.E0,
        }


def compute_equilibrium(E0: float, Q0: float, g: Grid, m: ModelFunctions,
                        charge_tol: float = 1e-12) -> Equilibrium:
    """Equilibrium with total energy ``E0`` and net charge ``Q0``.

    Raises
    ------
    DomainError
        If ``E0 <= 0``.
    ChargeCompatibilityError
        If ``|Q0| > charge_tol``; the Neumann problem forces zero net charge.
    """
    if not E0 > 0:
        raise DomainError(f"total energy must be positive, got {E0}")
    if abs(Q0) > charge_tol:
        raise ChargeCompatibilityError(f"net charge {Q0:.3e} must vanish (tolerance {charge_tol:.1e})")
    u_inf = E0 / g.volume
    w, w1, _ = eval_w(m, u_inf)
    s1 = eval_sigma(m, u_inf)[1]
    theta_inf = 1.0 / (s1 + 2.0 * w1)
    return Equilibrium(u_inf=float(u_inf), n_inf=float(w), p_inf=float(w),
                       theta_inf=float(theta_inf), E0=float(E0))


def equilibrium_state(eq: Equilibrium, g: Grid) -> State:
    return State(np.full(g.N, eq.n_inf), np.full(g.N, eq.p_inf), np.full(g.N, eq.u_inf))


def verify_equilibrium(eq: Equilibrium, m: ModelFunctions, g: Grid, tol: float = 1e-10) -> dict:
    """Evaluate the equilibrium state and check every vanishing quantity.

    Returns a dict of ``{check: {"value": ..., "passed": ...}}`` plus an
    overall ``"passed"`` flag; never raises on a failed check.
    """
    from .functionals import (
        entropy_production,
        reaction,
        relative_entropy,
        total_charge,
        total_energy,
    )
    from .poisson import solve_poisson

    s = equilibrium_state(eq, g)
    values = {
        "H": relative_entropy(s, eq, m, g),
        "P": entropy_production(s, m, g),
        "R": float(np.max(np.abs(reaction(s.n, s.p, s.u, m)))),
        "psi": float(np.max(np.abs(solve_poisson(g, s.n, s.p)))),
        "energy": abs(total_energy(s, g) - eq.E0),
        "charge": abs(total_charge(s, g)),
    }
    out = {k: {"value": float(v), "passed": bool(abs(v) <= tol * max(1.0, abs(eq.E0) if k == "energy" else 1.0))}
           for k, v in values.items()}
    out["passed"] = all(v["passed"] for v in out.values())
    return out
