"""Scalar functionals of a discrete state.

Gradients live on interior faces.  Every cell coefficient that multiplies a
gradient (``n, p, theta, gamma, w'/w``) is averaged arithmetically to the
face, while the permittivity uses the harmonic face mean of the Poisson
solver.  Face integrals are ``h * sum`` over interior faces.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from .errors import DomainError, PositivityError
from .grid import Grid, face_average, face_gradient, integrate, integrate_faces
from .model import (
    ModelFunctions,
    boltzmann,
    eval_sigma,
    eval_w,
    reaction_prefactor,
    relative_boltzmann,
    sigma_gap,
    w_gap,
)
from .poisson import field_energy, solve_poisson
from .state import State, temperature_and_gamma


def entropy_density(n, p, u, m: ModelFunctions):
    """``sigma(u) + (n + p) log w(u) - lambda(n) - lambda(p)``."""
    n = np.asarray(n, dtype=float)
    p = np.asarray(p, dtype=float)
    sig = eval_sigma(m, u)[0]
    logw = np.log(eval_w(m, u)[0])
    return sig + (n + p) * logw - boltzmann(n) - boltzmann(p)


def total_entropy(s: State, m: ModelFunctions, g: Grid) -> float:
    return integrate(g, entropy_density(s.n, s.p, s.u, m))


def total_energy(s: State, g: Grid) -> float:
    """Field energy ``(1/2) int eps |grad psi|^2`` plus ``int u``."""
    psi = solve_poisson(g, s.n, s.p)
    return 0.5 * field_energy(g, psi) + integrate(g, s.u)


def total_charge(s: State, g: Grid) -> float:
    """``int (q_n n + q_p p)`` with ``q_n = -1``, ``q_p = +1``."""
    return integrate(g, s.p - s.n)


def reaction(n, p, u, m: ModelFunctions):
    """Net generation ``R = F (w(u)^2 - n p)``."""
    w = eval_w(m, u)[0]
    return reaction_prefactor(m, n, p, u) * (w * w - np.asarray(n) * np.asarray(p))


def reactive_entropy_term(n, p, u, m: ModelFunctions):
    """``F (n p - w^2) log(n p / w^2) >= 0``.

    Raises
    ------
    PositivityError
        Where ``n p = 0``: the term diverges there.
    """
    n = np.asarray(n, dtype=float)
    p = np.asarray(p, dtype=float)
    if np.any(n * p <= 0):
        raise PositivityError("reactive entropy term diverges where n p = 0")
    w = eval_w(m, u)[0]
    F = reaction_prefactor(m, n, p, u)
    # (np - w^2) log(np / w^2) = w^2 (z - 1) log z with z = np / w^2
    zm1 = (n * p - w * w) / (w * w)
    val = F * w * w * zm1 * np.log1p(zm1)
    val = np.maximum(val, 0.0)
    return val if val.ndim else val[()]


@dataclass(frozen=True, eq=False)
class FaceCoefficients:
    """Face-averaged coefficients and face gradients of a positive state."""

    n: np.ndarray
    p: np.ndarray
    theta: np.ndarray
    gamma: np.ndarray
    ratio: np.ndarray  # w'/w
    eps: np.ndarray
    Dn: np.ndarray
    Dp: np.ndarray
    Du: np.ndarray
    Dpsi: np.ndarray
    psi: np.ndarray
    theta_cells: np.ndarray
    gamma_cells: np.ndarray


def _require_positive(s: State):
    if np.any(s.n <= 0) or np.any(s.p <= 0) or np.any(s.u <= 0):
        raise PositivityError("functional needs n, p, u > 0 in every cell")


def face_coefficients(s: State, m: ModelFunctions, g: Grid, psi=None) -> FaceCoefficients:
    _require_positive(s)
    theta, gamma, r = temperature_and_gamma(s.n, s.p, s.u, m)
    if psi is None:
        psi = solve_poisson(g, s.n, s.p)
    return FaceCoefficients(
        n=face_average(g, s.n),
        p=face_average(g, s.p),
        theta=face_average(g, theta),
        gamma=face_average(g, gamma),
        ratio=face_average(g, r),
        eps=g.eps_face,
        Dn=face_gradient(g, s.n),
        Dp=face_gradient(g, s.p),
        Du=face_gradient(g, s.u),
        Dpsi=face_gradient(g, psi),
        psi=psi,
        theta_cells=theta,
        gamma_cells=gamma,
    )


def entropy_production_terms(s: State, m: ModelFunctions, g: Grid, fc: FaceCoefficients | None = None) -> dict:
    """The four nonnegative summands of the entropy production.

    Keys are ``reactive``, ``n``, ``p`` and ``u``.
    """
    if fc is None:
        fc = face_coefficients(s, m, g)
    reactive = integrate(g, reactive_entropy_term(s.n, s.p, s.u, m))
    rn = fc.Dn - fc.n * fc.ratio * fc.Du - fc.n / fc.theta * fc.Dpsi
    rp = fc.Dp - fc.p * fc.ratio * fc.Du + fc.p / fc.theta * fc.Dpsi
    ru = fc.Du + (fc.p - fc.n) * fc.ratio / (fc.gamma * fc.theta) * fc.Dpsi
    return {
        "reactive": reactive,
        "n": integrate_faces(g, rn * rn / fc.n),
        "p": integrate_faces(g, rp * rp / fc.p),
        "u": integrate_faces(g, fc.gamma * ru * ru),
    }


def entropy_production(s: State, m: ModelFunctions, g: Grid, fc: FaceCoefficients | None = None) -> float:
    """Entropy production as reactive term plus three weighted squares."""
    return float(sum(entropy_production_terms(s, m, g, fc).values()))


def entropy_production_recast(s: State, m: ModelFunctions, g: Grid, fc: FaceCoefficients | None = None) -> float:
    """Entropy production expanded with the explicit cross term
    ``-2 int (w'/w)(grad n + grad p) . grad u``.

    Agrees with :func:`entropy_production` up to expansion round-off since
    both use the same face coefficients.
    """
    if fc is None:
        fc = face_coefficients(s, m, g)
    reactive = integrate(g, reactive_entropy_term(s.n, s.p, s.u, m))
    an = fc.Dn - fc.n / fc.theta * fc.Dpsi
    ap = fc.Dp + fc.p / fc.theta * fc.Dpsi
    r2 = fc.ratio**2
    dens = (
        -2.0 * fc.ratio * (fc.Dn + fc.Dp) * fc.Du
        + an * an / fc.n
        + ap * ap / fc.p
        + (fc.gamma + (fc.n + fc.p) * r2) * fc.Du**2
        + r2 * (fc.n - fc.p) ** 2 / (fc.theta**2 * fc.gamma) * fc.Dpsi**2
    )
    return reactive + integrate_faces(g, dens)


def dissipative_lower_bound_rhs(s: State, m: ModelFunctions, g: Grid, g_w: float,
                                fc: FaceCoefficients | None = None) -> float:
    """Gradient-controlling lower bound on the entropy production.

    Returns the reactive term plus ``(1/2 - g_w)`` times the
    ``eps/eps_max``-weighted drift-corrected density gradients, the
    ``|grad u|^2`` term and the ``|grad psi|^2`` term.  Up to the factor
    ``1 + 2 G^2 (g_w + 1/2)`` it is bounded by the entropy production.
    """
    if not g_w < 0.5:
        raise DomainError(f"need g_w < 1/2, got {g_w}")
    if fc is None:
        fc = face_coefficients(s, m, g)
    reactive = integrate(g, reactive_entropy_term(s.n, s.p, s.u, m))
    weight = (0.5 - g_w) * fc.eps / g.eps_max
    an = fc.Dn - fc.n / fc.theta * fc.Dpsi
    ap = fc.Dp + fc.p / fc.theta * fc.Dpsi
    r2 = fc.ratio**2
    dens = (
        an * an / fc.n
        + ap * ap / fc.p
        + (fc.gamma + (fc.n + fc.p) * r2) * fc.Du**2
        + r2 * (fc.n - fc.p) ** 2 / (fc.theta**2 * fc.gamma) * fc.Dpsi**2
    )
    return reactive + integrate_faces(g, weight * dens)


def inv_temp_gradient_functional(s: State, m: ModelFunctions, g: Grid,
                                 fc: FaceCoefficients | None = None) -> float:
    """``int gamma^{-1} |grad(1/theta)|^2``; bounded by twice the entropy production."""
    if fc is None:
        fc = face_coefficients(s, m, g)
    D = face_gradient(g, 1.0 / fc.theta_cells)
    return integrate_faces(g, D * D / fc.gamma)


def relative_entropy_terms(s: State, eq, m: ModelFunctions, g: Grid, psi=None) -> dict:
    """The four nonnegative groups of the relative entropy.

    ``densities`` is ``int w lambda(n/w) + w lambda(p/w)``, ``weight`` and
    ``sigma`` are the concavity gaps of ``2 w`` and ``sigma`` around
    ``u_inf``, and ``field`` is the field energy scaled by ``1/theta_inf``.
    """
    if np.any(s.u <= 0):
        raise PositivityError("relative entropy needs u > 0 in every cell")
    w = eval_w(m, s.u)[0]
    if psi is None:
        psi = solve_poisson(g, s.n, s.p)
    return {
        "densities": integrate(g, relative_boltzmann(s.n, w) + relative_boltzmann(s.p, w)),
        "weight": 2.0 * integrate(g, w_gap(m, s.u, eq.u_inf)),
        "sigma": integrate(g, sigma_gap(m, s.u, eq.u_inf)),
        "field": field_energy(g, psi) / (2.0 * eq.theta_inf),
    }


def relative_entropy(s: State, eq, m: ModelFunctions, g: Grid, psi=None) -> float:
    """Relative entropy to the equilibrium ``eq``, a sum of nonnegative groups."""
    return float(sum(relative_entropy_terms(s, eq, m, g, psi).values()))


@dataclass
class FunctionalReport:
    S_total: float
    E_total: float
    Q_total: float
    H: float
    P: float
    P_recast: float
    reactive_term: float
    dissipative_lb: float
    inv_temp_grad: float

    def to_dict(self) -> dict:
        return asdict(self)


def evaluate(s: State, eq, m: ModelFunctions, g: Grid, g_w: float) -> FunctionalReport:
    """All functionals of a strictly positive state in one pass."""
    fc = face_coefficients(s, m, g)
    terms = entropy_production_terms(s, m, g, fc)
    return FunctionalReport(
        S_total=total_entropy(s, m, g),
        E_total=0.5 * field_energy(g, fc.psi) + integrate(g, s.u),
        Q_total=total_charge(s, g),
        H=relative_entropy(s, eq, m, g, fc.psi),
        P=float(sum(terms.values())),
        P_recast=entropy_production_recast(s, m, g, fc),
        reactive_term=terms["reactive"],
        dissipative_lb=dissipative_lower_bound_rhs(s, m, g, g_w, fc),
        inv_temp_grad=inv_temp_gradient_functional(s, m, g, fc),
    )
