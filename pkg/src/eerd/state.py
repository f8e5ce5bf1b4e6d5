"""Discrete states ``(n, p, u)``, their derived fields and admissibility.

``n`` are electrons (charge -1), ``p`` holes (charge +1) and ``u`` the
internal energy density, all stored per cell.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ChargeCompatibilityError, ConfigError, PositivityError
from .grid import Grid, integrate
from .model import ModelFunctions, eval_sigma, eval_w, inverse_sigma_prime


@dataclass(frozen=True, eq=False)
class State:
    n: np.ndarray
    p: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        arrs = []
        for name in ("n", "p", "u"):
            a = np.array(getattr(self, name), dtype=float)
            if a.ndim != 1:
                raise ValueError(f"{name} must be a 1-D cell field")
            if not np.all(np.isfinite(a)):
                raise ValueError(f"{name} contains non-finite values")
            if np.any(a < 0):
                raise PositivityError(f"{name} has negative cells")
            a.setflags(write=False)
            arrs.append(a)
        if not arrs[0].shape == arrs[1].shape == arrs[2].shape:
            raise ValueError("n, p, u must have the same length")
        for name, a in zip(("n", "p", "u"), arrs):
            object.__setattr__(self, name, a)

    @property
    def N(self) -> int:
        return self.n.shape[0]

    def copy_with(self, **kw) -> "State":
        fields = {"n": self.n, "p": self.p, "u": self.u}
        fields.update(kw)
        return State(**fields)


@dataclass(frozen=True)
class Bounds:
    """Uniform temperature floor ``c_theta`` and energy ceiling ``C_u``."""

    c_theta: float
    C_u: float

    def __post_init__(self):
        if not self.c_theta > 0:
            raise ValueError(f"c_theta must be positive, got {self.c_theta}")
        if not self.C_u > 0:
            raise ValueError(f"C_u must be positive, got {self.C_u}")

    def c_u(self, m: ModelFunctions) -> float:
        """Implied energy floor ``(sigma')^{-1}(1 / c_theta)``."""
        return float(inverse_sigma_prime(m, 1.0 / self.c_theta))

    def C_theta(self, m: ModelFunctions) -> float:
        """Implied temperature ceiling ``1 / sigma'(C_u)``."""
        return float(1.0 / eval_sigma(m, self.C_u)[1])

    def N_max(self, m: ModelFunctions) -> float:
        """Density ceiling ``w(C_u) / (c_theta w'(C_u))``."""
        w, w1, _ = eval_w(m, self.C_u)
        return float(w / (self.c_theta * w1))


@dataclass(frozen=True, eq=False)
class DerivedFields:
    theta: np.ndarray
    gamma: np.ndarray
    psi: np.ndarray
    y_n: Optional[np.ndarray]
    y_p: Optional[np.ndarray]


def charge_tol(s: State, g: Grid) -> float:
    """Round-off scale for the net-charge compatibility condition."""
    return 1e-12 * max(integrate(g, s.n), integrate(g, s.p), 1.0)


def _check_grid(s: State, g: Grid):
    if s.N != g.N:
        raise ValueError(f"state has {s.N} cells but the grid has {g.N}")


def temperature_and_gamma(n, p, u, m: ModelFunctions):
    """Per-cell ``(theta, gamma, w'/w)``; requires ``u > 0``."""
    _, s1, s2 = eval_sigma(m, u)
    w, w1, w2 = eval_w(m, u)
    c = np.asarray(n) + np.asarray(p)
    r = w1 / w
    theta = 1.0 / (s1 + c * r)
    gamma = -s2 - c * w2 / w
    return theta, gamma, r


def derive_fields(s: State, m: ModelFunctions, g: Grid, potentials: bool = True) -> DerivedFields:
    """Temperature, ``gamma``, potential and chemical potentials of a state.

    Parameters
    ----------
    potentials
        Compute ``y_c = -log(c / w(u))``.  This needs ``n, p > 0``; with
        ``potentials=False`` vanishing densities are allowed and ``y_n``,
        ``y_p`` are ``None``.

    Raises
    ------
    PositivityError
        If ``u`` vanishes somewhere, or if ``potentials`` is set and ``n`` or
        ``p`` vanishes somewhere.
    """
    from .poisson import solve_poisson

    _check_grid(s, g)
    if np.any(s.u <= 0):
        raise PositivityError("u must be strictly positive in every cell")
    if potentials and (np.any(s.n <= 0) or np.any(s.p <= 0)):
        raise PositivityError("chemical potentials need n, p > 0 in every cell")
    theta, gamma, _ = temperature_and_gamma(s.n, s.p, s.u, m)
    psi = solve_poisson(g, s.n, s.p)
    y_n = y_p = None
    if potentials:
        w = eval_w(m, s.u)[0]
        y_n = -np.log(s.n / w)
        y_p = -np.log(s.p / w)
    return DerivedFields(theta, gamma, psi, y_n, y_p)


@dataclass
class AdmissibilityReport:
    energy_ceiling: bool
    temperature_floor: bool
    charge_compatible: bool
    positive: bool
    u_min: float
    u_max: float
    theta_min: float
    theta_max: float
    c_u: float
    C_theta: float
    N_max: float
    net_charge: float

    @property
    def admissible(self) -> bool:
        return self.energy_ceiling and self.temperature_floor and self.charge_compatible and self.positive

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["admissible"] = self.admissible
        return d


def check_admissible(s: State, b: Bounds, m: ModelFunctions, g: Grid) -> AdmissibilityReport:
    """Check ``u <= C_u``, ``theta >= c_theta`` and charge compatibility.

    Never raises on a failing state; a state with ``u = 0`` somewhere is
    reported as not positive.
    """
    _check_grid(s, g)
    positive = bool(np.all(s.u > 0))
    if positive:
        theta, _, _ = temperature_and_gamma(s.n, s.p, s.u, m)
        t_min, t_max = float(theta.min()), float(theta.max())
    else:
        t_min = t_max = float("nan")
    q = integrate(g, s.p - s.n)
    return AdmissibilityReport(
        energy_ceiling=bool(np.all(s.u <= b.C_u)),
        temperature_floor=positive and t_min >= b.c_theta,
        charge_compatible=abs(q) <= charge_tol(s, g),
        positive=positive,
        u_min=float(s.u.min()),
        u_max=float(s.u.max()),
        theta_min=t_min,
        theta_max=t_max,
        c_u=b.c_u(m),
        C_theta=b.C_theta(m),
        N_max=b.N_max(m),
        net_charge=q,
    )


def require_neutral(s: State, g: Grid):
    q = integrate(g, s.p - s.n)
    if abs(q) > charge_tol(s, g):
        raise ChargeCompatibilityError(f"net charge {q:.3e} exceeds tolerance {charge_tol(s, g):.1e}")


def write_state_csv(path, s: State, g: Grid):
    """Write columns ``x,n,p,u`` with full double precision."""
    data = np.column_stack([g.x, s.n, s.p, s.u])
    np.savetxt(path, data, delimiter=",", header="x,n,p,u", comments="", fmt="%.17g")


def read_state_csv(path, g: Optional[Grid] = None) -> State:
    """Read a state written by :func:`write_state_csv`.

    If ``g`` is given the number of rows must match ``g.N``.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader)]
        if header != ["x", "n", "p", "u"]:
            raise ConfigError(f"{path}: expected header x,n,p,u, got {','.join(header)}")
        rows = [[float(v) for v in row] for row in reader if row]
    data = np.array(rows, dtype=float).reshape(-1, 4)
    if g is not None and data.shape[0] != g.N:
        raise ConfigError(f"{path}: {data.shape[0]} rows but the grid has {g.N} cells")
    return State(data[:, 1], data[:, 2], data[:, 3])
