"""Explicit finite-volume integration of the electron/hole/energy system.

The fluxes are

    j_n = -grad n + (n/theta)(1 + A) grad psi
    j_p = -grad p - (p/theta)(1 - A) grad psi
    j_u = -grad u + (1/theta) ((n - p)/gamma) (w'/w) grad psi

with ``A = (n - p)/gamma * (w'/w)**2``, and the evolution is

    dn/dt = -div j_n + R,  dp/dt = -div j_p + R,
    du/dt = -div j_u + (j_n - j_p) . grad psi.

The Joule term is formed per face and split half to each neighbouring
cell, which makes the semi-discrete total energy an exact invariant.
:func:`rhs` and :func:`step` are the readable numpy reference; :func:`run`
drives the compiled kernel in :mod:`eerd._kernels`, which implements the
same formulas.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .errors import ConfigError, PositivityError, StepFailure
from .functionals import entropy_production, relative_entropy, total_entropy
from .grid import Grid, divergence_of_face_flux, face_average, face_gradient, face_to_cells, integrate
from .model import ModelFunctions, eval_w
from .poisson import field_energy, h1_norm, solve_poisson
from .state import Bounds, DerivedFields, State, derive_fields

MAX_HALVINGS = 40

TRAJECTORY_COLUMNS = ("t", "S", "E", "Q", "H", "P", "l1_n", "l1_p", "l1_u", "h1_psi", "dt")


@dataclass(frozen=True, eq=False)
class FluxSet:
    """Fluxes on the interior faces; boundary faces carry zero flux."""

    j_n: np.ndarray
    j_p: np.ndarray
    j_u: np.ndarray


def compute_fluxes(s: State, d: DerivedFields, m: ModelFunctions, g: Grid) -> FluxSet:
    if np.any(s.u <= 0):
        raise PositivityError("fluxes need u > 0 in every cell")
    w, w1, _ = eval_w(m, s.u)
    nf = face_average(g, s.n)
    pf = face_average(g, s.p)
    tf = face_average(g, d.theta)
    gf = face_average(g, d.gamma)
    rf = face_average(g, w1 / w)
    Dpsi = face_gradient(g, d.psi)
    A = (nf - pf) / gf * rf**2
    j_n = -face_gradient(g, s.n) + nf / tf * (1.0 + A) * Dpsi
    j_p = -face_gradient(g, s.p) - pf / tf * (1.0 - A) * Dpsi
    j_u = -face_gradient(g, s.u) + (nf - pf) / gf * rf / tf * Dpsi
    return FluxSet(j_n, j_p, j_u)


def rhs(s: State, m: ModelFunctions, g: Grid):
    """Semi-discrete time derivatives ``(dn, dp, du)``."""
    from .functionals import reaction

    d = derive_fields(s, m, g, potentials=False)
    fl = compute_fluxes(s, d, m, g)
    R = reaction(s.n, s.p, s.u, m)
    joule = (fl.j_n - fl.j_p) * face_gradient(g, d.psi)
    dn = -divergence_of_face_flux(g, fl.j_n) + R
    dp = -divergence_of_face_flux(g, fl.j_p) + R
    du = -divergence_of_face_flux(g, fl.j_u) + face_to_cells(g, joule)
    return dn, dp, du


def default_floor(b: Bounds, m: ModelFunctions) -> float:
    return 1e-12 * b.N_max(m)


def _acceptable(n, p, u, m: ModelFunctions, b: Bounds, floor: float) -> bool:
    if min(n.min(), p.min(), u.min()) < floor or u.max() > b.C_u:
        return False
    from .state import temperature_and_gamma

    theta = temperature_and_gamma(n, p, u, m)[0]
    return bool(theta.min() >= b.c_theta)


def step(s: State, dt: float, m: ModelFunctions, g: Grid, b: Bounds,
         floor: Optional[float] = None) -> tuple[State, float]:
    """One explicit Euler step with rejection.

    The trial state ``s + dt * rhs(s)`` is rejected if a component drops
    below ``floor``, the temperature drops below ``c_theta`` or ``u``
    exceeds ``C_u``; ``dt`` is then halved, at most 40 times.

    Returns
    -------
    (State, float)
        The accepted state and the step actually taken.

    Raises
    ------
    StepFailure
        If every halving was rejected.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if floor is None:
        floor = default_floor(b, m)
    dn, dp, du = rhs(s, m, g)
    for _ in range(MAX_HALVINGS + 1):
        n, p, u = s.n + dt * dn, s.p + dt * dp, s.u + dt * du
        if _acceptable(n, p, u, m, b, floor):
            return State(n, p, u), dt
        dt *= 0.5
    raise StepFailure(f"no admissible step after {MAX_HALVINGS} halvings", t=None)


@dataclass
class SimConfig:
    """Integration controls.

    ``steady_tol`` is the sup-norm of the right-hand side below which the
    state is treated as stationary: integration stops and the remaining
    samples up to ``t_end`` repeat the frozen state with ``dt = 0``.  Set
    it to 0 to always integrate to ``t_end``.
    """

    t_end: float
    dt_init: float = 1e-3
    cfl: float = 0.2
    sample_every: int = 100
    positivity_floor: Optional[float] = None
    steady_tol: float = 1e-9
    fill_samples: int = 20

    def __post_init__(self):
        if not self.t_end > 0:
            raise ConfigError(f"t_end must be positive, got {self.t_end}")
        if not self.dt_init > 0:
            raise ConfigError(f"dt_init must be positive, got {self.dt_init}")
        if not 0 < self.cfl < 1:
            raise ConfigError(f"cfl must lie in (0, 1), got {self.cfl}")
        if int(self.sample_every) != self.sample_every or self.sample_every < 1:
            raise ConfigError(f"sample_every must be a positive integer, got {self.sample_every}")
        if self.positivity_floor is not None and not self.positivity_floor > 0:
            raise ConfigError("positivity_floor must be positive")
        if self.steady_tol < 0:
            raise ConfigError("steady_tol must be nonnegative")


@dataclass
class Trajectory:
    t: np.ndarray
    S: np.ndarray
    E: np.ndarray
    Q: np.ndarray
    H: np.ndarray
    P: np.ndarray
    l1_n: np.ndarray
    l1_p: np.ndarray
    l1_u: np.ndarray
    h1_psi: np.ndarray
    dt: np.ndarray
    rate: float
    C3: float
    final_state: State
    steps: int
    converged_at: Optional[float] = None
    frozen: np.ndarray = field(default=None)

    @property
    def H0(self) -> float:
        return float(self.H[0])

    @property
    def envelope(self) -> np.ndarray:
        """Predicted bound ``H0 exp(-rate t)``."""
        return self.H0 * np.exp(-self.rate * self.t)

    @property
    def corollary_lhs(self) -> np.ndarray:
        """``max(||n - n_inf||_1^2, ||p - p_inf||_1^2, ||u - u_inf||_1^2, ||psi||_H1^2)``."""
        return np.max(np.vstack([self.l1_n, self.l1_p, self.l1_u, self.h1_psi]) ** 2, axis=0)

    @property
    def corollary_bound(self) -> np.ndarray:
        return self.C3 * np.exp(-self.rate * self.t)

    def columns(self) -> dict:
        return {c: getattr(self, c) for c in TRAJECTORY_COLUMNS}


def diagnostics(s: State, eq, m: ModelFunctions, g: Grid) -> tuple:
    """``(S, E, Q, H, P, l1_n, l1_p, l1_u, h1_psi)`` of a positive state."""
    psi = solve_poisson(g, s.n, s.p)
    return (
        total_entropy(s, m, g),
        0.5 * field_energy(g, psi) + integrate(g, s.u),
        integrate(g, s.p - s.n),
        relative_entropy(s, eq, m, g, psi),
        entropy_production(s, m, g),
        integrate(g, np.abs(s.n - eq.n_inf)),
        integrate(g, np.abs(s.p - eq.p_inf)),
        integrate(g, np.abs(s.u - eq.u_inf)),
        h1_norm(g, psi),
    )


def run(s0: State, cfg: SimConfig, m: ModelFunctions, g: Grid, eq, consts, b: Bounds) -> Trajectory:
    """Integrate from ``s0`` to ``cfg.t_end`` and record diagnostics.

    Samples are taken at ``t = 0`` and every ``cfg.sample_every`` accepted
    steps.  ``consts`` supplies the predicted ``rate`` and ``C3`` reported
    alongside the measured curves.

    Raises
    ------
    StepFailure
        With the failing time in ``.t``.
    """
    if s0.N != g.N:
        raise ValueError(f"state has {s0.N} cells but the grid has {g.N}")
    floor = cfg.positivity_floor if cfg.positivity_floor is not None else default_floor(b, m)
    prm = _kernels.pack_params(m)
    eps_f = np.ascontiguousarray(g.eps_face)
    n, p, u = (np.array(a, dtype=float) for a in (s0.n, s0.p, s0.u))

    rows = [(0.0,) + diagnostics(s0, eq, m, g) + (0.0,)]
    frozen = [False]
    t = 0.0
    dt_prev = 0.5 * cfg.dt_init
    steps = 0
    converged_at = None
    while t < cfg.t_end:
        status, t, k, dt_prev, _ = _kernels.advance(
            n, p, u, prm, eps_f, g.h, t, cfg.t_end, int(cfg.sample_every), dt_prev, cfg.cfl,
            floor, b.c_theta, b.C_u, cfg.steady_tol, MAX_HALVINGS,
        )
        steps += k
        if status == _kernels.FAILED:
            raise StepFailure(f"no admissible step after {MAX_HALVINGS} halvings at t = {t:.6g}", t=t)
        s = State(n.copy(), p.copy(), u.copy())
        if k > 0:
            rows.append((t,) + diagnostics(s, eq, m, g) + (dt_prev,))
            frozen.append(False)
        if status == _kernels.STEADY:
            converged_at = t
            last = rows[-1]
            fill = np.linspace(t, cfg.t_end, cfg.fill_samples + 1)[1:]
            for tf in fill:
                if tf > rows[-1][0]:
                    rows.append((float(tf),) + tuple(last[1:-1]) + (0.0,))
                    frozen.append(True)
            t = cfg.t_end
            break

    data = np.array(rows, dtype=float)
    cols = {c: data[:, i] for i, c in enumerate(TRAJECTORY_COLUMNS)}
    return Trajectory(
        **cols,
        rate=float(consts.rate),
        C3=float(consts.C3),
        final_state=State(n, p, u),
        steps=steps,
        converged_at=converged_at,
        frozen=np.array(frozen, dtype=bool),
    )


def fitted_decay_rate(traj: Trajectory, rel_floor: float = 1e-10) -> Optional[float]:
    """Least-squares slope of ``-log H`` over the second half of the run.

    Only dynamically integrated samples (not the frozen fill) with
    ``H > rel_floor * H0`` enter the fit, so round-off at the stationary
    end does not flatten the slope.  Returns ``None`` when fewer than
    three such samples exist (for instance ``H == 0`` throughout).
    """
    H0 = traj.H0
    if not H0 > 0:
        return None
    live = ~traj.frozen & (traj.H > rel_floor * H0)
    if not np.any(live):
        return None
    t_last = traj.t[live].max()
    mask = live & (traj.t >= 0.5 * t_last)
    if mask.sum() < 3:
        return None
    slope = np.polyfit(traj.t[mask], np.log(traj.H[mask]), 1)[0]
    return float(-slope)


def write_trajectory_csv(path, traj: Trajectory):
    data = np.column_stack([traj.columns()[c] for c in TRAJECTORY_COLUMNS])
    np.savetxt(path, data, delimiter=",", header=",".join(TRAJECTORY_COLUMNS), comments="", fmt="%.17g")
