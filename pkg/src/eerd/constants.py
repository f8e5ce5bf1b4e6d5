"""Explicit constants of the entropy/entropy-production estimates.

Everything here is a closed-form function of the model, the bounds
``(c_theta, C_u)``, the grid (length and permittivity range) and the
equilibrium.  Suprema and infima of second derivatives are taken in
closed form and confirmed on a dense sample; the more conservative of
the two values is kept.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict
from typing import NamedTuple

import numpy as np

from .errors import BandError
from .grid import Grid, poincare_constant
from .model import ConstantRate, ModelFunctions, eval_sigma, eval_w, hypothesis_constants
from .state import Bounds

#: Number of points of the dense sample confirming closed-form sup/inf values.
DENSE_SAMPLES = 10_000


@dataclass(frozen=True)
class HypothesisConstants:
    g_w: float
    G_w: float
    G_sigma: float
    c_theta: float
    C_u: float
    c_u: float
    C_theta: float
    N_max: float
    c_F: float
    C_P: float
    eps_min: float
    eps_max: float
    volume: float

    def to_dict(self) -> dict:
        return asdict(self)


class KConstants(NamedTuple):
    K_sigma: float
    K_w: float
    k_sigma: float
    k_w: float


@dataclass(frozen=True)
class EEPConstants:
    K_sigma: float
    K_w: float
    k_sigma: float
    k_w: float
    C1: float
    C2_tilde: float
    C2: float
    C3: float
    rate: float

    def to_dict(self) -> dict:
        return asdict(self)


def compute_hypothesis_constants(b: Bounds, m: ModelFunctions, g: Grid) -> HypothesisConstants:
    """Structural constants, implied bounds and the reaction floor ``c_F``.

    Raises
    ------
    HypothesisViolation
        If the weight exponent gives ``g_w >= 1/2``.
    """
    c_u = b.c_u(m)
    g_w, G_w, G_sigma = hypothesis_constants(m, c_u)
    N_max = b.N_max(m)
    r = m.rate
    if isinstance(r, ConstantRate):
        c_F = r.F0
    else:
        # F is decreasing in n and p, both bounded by N_max
        c_F = 1.0 / (r.k1 + (r.k2 + r.k3) * N_max)
    return HypothesisConstants(
        g_w=g_w, G_w=G_w, G_sigma=G_sigma,
        c_theta=float(b.c_theta), C_u=float(b.C_u), c_u=c_u, C_theta=b.C_theta(m), N_max=N_max,
        c_F=float(c_F), C_P=poincare_constant(g),
        eps_min=g.eps_min, eps_max=g.eps_max, volume=g.volume,
    )


def _neg_second(m: ModelFunctions, u):
    return -eval_sigma(m, u)[2], -eval_w(m, u)[2]


def compute_K_constants(hc: HypothesisConstants, eq, m: ModelFunctions) -> KConstants:
    """Taylor-remainder constants for ``sigma`` and ``w``.

    ``K`` are half the sup of ``-f''`` over ``[c_u, C_u]``, ``k`` half the
    inf over ``(0, C_u]`` for ``sigma`` and ``[0, C_u]`` for ``w``.  For
    the built-in families ``-f''`` is decreasing, so the closed forms are
    the values at the left (sup) and right (inf) end points.

    Raises
    ------
    BandError
        If ``u_inf`` lies outside ``[c_u, C_u]``.
    """
    c_u, C_u = hc.c_u, hc.C_u
    if not c_u <= eq.u_inf <= C_u:
        raise BandError(f"u_inf = {eq.u_inf:.6g} outside the band [c_u, C_u] = [{c_u:.6g}, {C_u:.6g}]")

    s_lo, w_lo = _neg_second(m, c_u)
    s_hi, w_hi = _neg_second(m, C_u)
    w_zero = -eval_w(m, 0.0)[2]

    band = np.linspace(c_u, C_u, DENSE_SAMPLES)
    s_band, w_band = _neg_second(m, band)
    low = np.linspace(0.0, C_u, DENSE_SAMPLES)
    w_low = -eval_w(m, low)[2]
    s_low = -eval_sigma(m, low[1:])[2]

    K_sigma = 0.5 * max(float(s_lo), float(s_band.max()))
    K_w = 0.5 * max(float(w_lo), float(w_band.max()))
    k_sigma = 0.5 * min(float(s_hi), float(s_low.min()))
    k_w = 0.5 * min(float(w_hi), float(w_zero), float(w_low.min()))
    return KConstants(K_sigma, K_w, k_sigma, k_w)


def compute_C1(hc: HypothesisConstants, K: KConstants, eq, m: ModelFunctions) -> float:
    """Constant bounding the relative entropy by the quadratic distance."""
    w0, w1_0, _ = eval_w(m, 0.0)
    first = 2.0 / w0 + hc.C_P / (eq.theta_inf * hc.eps_min)
    second = 2.0 * (2.0 * w1_0**2 / w0 + K.K_w) + K.K_sigma
    return float(max(first, second))


def compute_C2(hc: HypothesisConstants, eq, m: ModelFunctions) -> tuple[float, float]:
    """``(C2_tilde, C2)`` bounding the quadratic distance by the entropy production."""
    _, s1, s2 = eval_sigma(m, hc.C_u)
    w, w1, _ = eval_w(m, hc.C_u)
    G = max(hc.G_sigma, hc.G_w)
    reaction_factor = max(1.0, s1 / (4.0 * hc.eps_max * hc.c_F)) + 2.0 * G**2
    scale = 2.0 * hc.eps_max / (1.0 - 2.0 * hc.g_w)
    inner = max(
        1.0 / s1,
        hc.C_P / hc.eps_min * (hc.C_P * w**2 / (4.0 * hc.eps_min * hc.c_theta * w1**2) - 1.0 / s2),
    )
    C2_tilde = reaction_factor * scale * inner
    w1_0 = eval_w(m, 0.0)[1]
    C2 = (2.0 + max(4.0 * w1_0**2 - 1.0, 0.0)) * C2_tilde
    return float(C2_tilde), float(C2)


def compute_C3(hc: HypothesisConstants, K: KConstants, eq, H0: float, m: ModelFunctions) -> float:
    """Prefactor of the exponential convergence in L1 and H1 norms."""
    if H0 < 0:
        raise ValueError(f"H0 must be nonnegative, got {H0}")
    w, w1, _ = eval_w(m, hc.C_u)
    w1_0 = eval_w(m, 0.0)[1]
    vol = hc.volume
    first = 2.0 * vol * (2.0 * w / (3.0 * hc.c_theta * w1) + 4.0 * w / 3.0 + w1_0**2 / (2.0 * K.k_w))
    second = vol / K.k_sigma
    third = 2.0 * (1.0 + hc.C_P) * eq.theta_inf / hc.eps_min
    return float(max(first, second, third) * H0)


def compute_eep_constants(hc: HypothesisConstants, eq, m: ModelFunctions, H0: float = 0.0) -> EEPConstants:
    K = compute_K_constants(hc, eq, m)
    C1 = compute_C1(hc, K, eq, m)
    C2_tilde, C2 = compute_C2(hc, eq, m)
    C3 = compute_C3(hc, K, eq, H0, m)
    return EEPConstants(*K, C1=C1, C2_tilde=C2_tilde, C2=C2, C3=C3, rate=1.0 / (C1 * C2))


#: What each reported constant certifies, in plain words.
CERTIFIES = {
    "g_w": "weight concavity: (w')^2 <= -g_w w'' w, requires g_w < 1/2",
    "G_w": "weight concavity upper bound: -w'' w <= G_w (w')^2",
    "G_sigma": "mixed bound -sigma'' w <= G_sigma sigma' w' for u >= c_u",
    "c_u": "energy floor implied by the temperature floor, (sigma')^{-1}(1/c_theta)",
    "C_theta": "temperature ceiling implied by the energy ceiling, 1/sigma'(C_u)",
    "N_max": "density ceiling w(C_u)/(c_theta w'(C_u)) of admissible states",
    "c_F": "lower bound of the reaction prefactor on admissible states",
    "C_P": "Neumann Poincare constant (L/pi)^2 of the interval",
    "K_sigma": "upper Taylor-remainder constant of sigma on [c_u, C_u]",
    "K_w": "upper Taylor-remainder constant of w on [c_u, C_u]",
    "k_sigma": "lower Taylor-remainder constant of sigma on (0, C_u]",
    "k_w": "lower Taylor-remainder constant of w on [0, C_u]",
    "C1": "relative entropy <= C1 * quadratic distance to equilibrium",
    "C2_tilde": "quadratic distance <= C2_tilde * entropy production, before the w'(0) factor",
    "C2": "quadratic distance <= C2 * entropy production",
    "C3": "L1 distances and squared H1 norm of psi <= C3 exp(-rate t)",
    "rate": "exponential decay rate 1/(C1 C2) of the relative entropy",
}


def constants_record(hc: HypothesisConstants, ec: EEPConstants, eq, H0: float | None = None) -> dict:
    """JSON-ready record ``{name: {"value": ..., "certifies": ...}}``."""
    out = {}
    values = {**hc.to_dict(), **ec.to_dict()}
    for name, text in CERTIFIES.items():
        out[name] = {"value": values[name], "certifies": text}
    for name in ("c_theta", "C_u", "eps_min", "eps_max", "volume"):
        out[name] = {"value": values[name], "certifies": "input"}
    out["theta_inf"] = {"value": eq.theta_inf, "certifies": "equilibrium temperature"}
    if H0 is not None:
        out["H0"] = {"value": H0, "certifies": "initial relative entropy scaling C3"}
    return out
