"""Model functions: thermal entropy, equilibrium density, reaction rate.

The entropy density of the two-species system is

    S(n, p, u) = sigma(u) + n log w(u) - lambda(n) + p log w(u) - lambda(p)

with the Boltzmann function ``lambda(s) = s log s - s + 1``.  This module
holds the closed-form families for ``sigma`` and ``w``, the reaction
prefactor ``F``, and the constants certifying the structural hypotheses
on these functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.special import xlogy

from .errors import DomainError, HypothesisViolation

#: Sampling grid used to confirm the closed-form hypothesis constants.
SAMPLE_GRID = np.logspace(-6.0, 6.0, 10_000)

# relative slack for sampled inequalities that hold with equality
_SAMPLE_RTOL = 1e-12


@dataclass(frozen=True)
class LogEntropy:
    """Thermal entropy ``sigma(u) = a log u``."""

    a: float = 1.0

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"LogEntropy needs a > 0, got {self.a}")


@dataclass(frozen=True)
class PowerEntropy:
    """Thermal entropy ``sigma(u) = a u**alpha`` with ``0 < alpha < 1``."""

    a: float = 1.0
    alpha: float = 0.5

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"PowerEntropy needs a > 0, got {self.a}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"PowerEntropy needs 0 < alpha < 1, got {self.alpha}")


@dataclass(frozen=True)
class PowerWeight:
    """Equilibrium density ``w(u) = b (1 + u)**beta``.

    Only ``0 < beta < 1`` is enforced here; the stronger ``beta < 1/3``
    needed by the entropy estimates is checked by
    :func:`hypothesis_constants` so that violating models can still be
    built and reported on.
    """

    b: float = 1.0
    beta: float = 0.25

    def __post_init__(self):
        if not self.b > 0:
            raise ValueError(f"PowerWeight needs b > 0, got {self.b}")
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"PowerWeight needs 0 < beta < 1, got {self.beta}")


@dataclass(frozen=True)
class ConstantRate:
    """Reaction prefactor ``F = F0``."""

    F0: float = 1.0

    def __post_init__(self):
        if not self.F0 > 0:
            raise ValueError(f"ConstantRate needs F0 > 0, got {self.F0}")


@dataclass(frozen=True)
class SRH:
    """Shockley-Read-Hall prefactor ``F = 1 / (k1 + k2 n + k3 p)``."""

    k1: float = 1.0
    k2: float = 0.0
    k3: float = 0.0

    def __post_init__(self):
        if not self.k1 > 0:
            raise ValueError(f"SRH needs k1 > 0, got {self.k1}")
        if self.k2 < 0 or self.k3 < 0:
            raise ValueError("SRH needs k2, k3 >= 0")


Sigma = Union[LogEntropy, PowerEntropy]
Rate = Union[ConstantRate, SRH]


@dataclass(frozen=True)
class ModelFunctions:
    sigma: Sigma = field(default_factory=LogEntropy)
    weight: PowerWeight = field(default_factory=PowerWeight)
    rate: Rate = field(default_factory=ConstantRate)

    def to_dict(self) -> dict:
        s, w, r = self.sigma, self.weight, self.rate
        out = {}
        if isinstance(s, LogEntropy):
            out.update(sigma="log", a=s.a)
        else:
            out.update(sigma="power", a=s.a, alpha=s.alpha)
        out.update(b=w.b, beta=w.beta)
        if isinstance(r, ConstantRate):
            out.update(rate="constant", F0=r.F0)
        else:
            out.update(rate="srh", k1=r.k1, k2=r.k2, k3=r.k3)
        return out


def _scalar_or_array(x):
    x = np.asarray(x, dtype=float)
    return x if x.ndim else x[()]


def eval_sigma(model: ModelFunctions, u):
    """Return ``(sigma, sigma', sigma'')`` at ``u > 0``."""
    u = np.asarray(u, dtype=float)
    if np.any(~(u > 0)):
        raise DomainError("thermal entropy is defined for u > 0 only")
    s = model.sigma
    if isinstance(s, LogEntropy):
        val = s.a * np.log(u)
        d1 = s.a / u
        d2 = -s.a / (u * u)
    else:
        ua = u**s.alpha
        val = s.a * ua
        d1 = s.a * s.alpha * ua / u
        d2 = s.a * s.alpha * (s.alpha - 1.0) * ua / (u * u)
    return _scalar_or_array(val), _scalar_or_array(d1), _scalar_or_array(d2)


def eval_w(model: ModelFunctions, u):
    """Return ``(w, w', w'')`` at ``u >= 0``."""
    u = np.asarray(u, dtype=float)
    if np.any(~(u >= 0)):
        raise DomainError("equilibrium density is defined for u >= 0 only")
    b, beta = model.weight.b, model.weight.beta
    v = 1.0 + u
    w = b * v**beta
    d1 = beta * w / v
    d2 = beta * (beta - 1.0) * w / (v * v)
    return _scalar_or_array(w), _scalar_or_array(d1), _scalar_or_array(d2)


def boltzmann(s):
    """Boltzmann function ``s log s - s + 1`` with ``lambda(0) = 1``."""
    s = np.asarray(s, dtype=float)
    if np.any(~(s >= 0)):
        raise DomainError("Boltzmann function is defined for s >= 0 only")
    return _scalar_or_array(xlogy(s, s) - s + 1.0)


def relative_boltzmann(c, w):
    """``c log(c/w) - c + w`` evaluated without cancellation near ``c = w``.

    Equals ``w * lambda(c/w)``; nonnegative for ``c >= 0, w > 0``.
    """
    c = np.asarray(c, dtype=float)
    w = np.asarray(w, dtype=float)
    x = (c - w) / w
    with np.errstate(divide="ignore", invalid="ignore"):
        near = (1.0 + x) * np.log1p(x) - x
    # log1p(-1) = -inf at c = 0; the limit value is lambda(0) = 1
    val = np.where(c > 0, near, 1.0)
    return _scalar_or_array(np.maximum(w * val, 0.0))


def sigma_gap(model: ModelFunctions, u, u0):
    """Concavity gap ``-(sigma(u) - sigma'(u0)(u - u0) - sigma(u0)) >= 0``."""
    u = np.asarray(u, dtype=float)
    if np.any(~(u > 0)) or not u0 > 0:
        raise DomainError("thermal entropy is defined for u > 0 only")
    x = (u - u0) / u0
    s = model.sigma
    if isinstance(s, LogEntropy):
        gap = s.a * (x - np.log1p(x))
    else:
        gap = -s.a * u0**s.alpha * (np.expm1(s.alpha * np.log1p(x)) - s.alpha * x)
    return _scalar_or_array(np.maximum(gap, 0.0))


def w_gap(model: ModelFunctions, u, u0):
    """Concavity gap ``-(w(u) - w'(u0)(u - u0) - w(u0)) >= 0``."""
    u = np.asarray(u, dtype=float)
    if np.any(~(u >= 0)) or not u0 >= 0:
        raise DomainError("equilibrium density is defined for u >= 0 only")
    b, beta = model.weight.b, model.weight.beta
    y = (u - u0) / (1.0 + u0)
    gap = -b * (1.0 + u0) ** beta * (np.expm1(beta * np.log1p(y)) - beta * y)
    return _scalar_or_array(np.maximum(gap, 0.0))


def inverse_sigma_prime(model: ModelFunctions, y):
    """The unique ``u > 0`` with ``sigma'(u) = y``."""
    y = np.asarray(y, dtype=float)
    if np.any(~(y > 0)):
        raise DomainError("sigma' takes values in (0, inf) only")
    s = model.sigma
    if isinstance(s, LogEntropy):
        u = s.a / y
    else:
        u = (s.a * s.alpha / y) ** (1.0 / (1.0 - s.alpha))
    return _scalar_or_array(u)


def reaction_prefactor(model: ModelFunctions, n, p, u=None):
    """Reaction rate prefactor ``F(n, p, u)``; the built-ins ignore ``u``."""
    r = model.rate
    n = np.asarray(n, dtype=float)
    p = np.asarray(p, dtype=float)
    if isinstance(r, ConstantRate):
        F = np.full(np.broadcast(n, p).shape, r.F0)
    else:
        F = 1.0 / (r.k1 + r.k2 * n + r.k3 * p)
    return _scalar_or_array(F)


def hypothesis_constants(model: ModelFunctions, c_u: float):
    """Closed-form ``(g_w, G_w, G_sigma(c_u))`` for the power weight family.

    Raises
    ------
    HypothesisViolation
        If ``beta >= 1/3``: then ``g_w = beta/(1-beta) >= 1/2``.
    DomainError
        If ``c_u <= 0``.
    """
    if not c_u > 0:
        raise DomainError(f"c_u must be positive, got {c_u}")
    beta = model.weight.beta
    g_w = beta / (1.0 - beta)
    if g_w >= 0.5:
        raise HypothesisViolation(
            f"beta = {beta} gives g_w = {g_w:.6g} >= 1/2; need beta < 1/3"
        )
    G_w = (1.0 - beta) / beta
    G_sigma = (1.0 + c_u) / (beta * c_u)
    if isinstance(model.sigma, PowerEntropy):
        G_sigma *= 1.0 - model.sigma.alpha
    return g_w, G_w, G_sigma


@dataclass
class HypothesisCheck:
    name: str
    passed: bool
    constant: float | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "constant": self.constant,
            "detail": self.detail,
        }


@dataclass
class HypothesisReport:
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": [c.to_dict() for c in self.checks]}


def check_hypotheses(model: ModelFunctions, grid=SAMPLE_GRID, c_values=(1e-3, 0.1, 1.0, 10.0)):
    """Check the structural hypotheses on sigma, w and F.

    Each entry records the closed-form certifying constant and whether a
    pointwise confirmation holds on ``grid``.  Failures are reported, not
    raised.
    """
    u = np.asarray(grid, dtype=float)
    _, s1, s2 = eval_sigma(model, u)
    w, w1, w2 = eval_w(model, u)
    w0 = eval_w(model, 0.0)[0]
    beta = model.weight.beta
    checks = []

    checks.append(HypothesisCheck(
        "M1", bool(np.all(s1 > 0) and np.all(s2 < 0)),
        detail="sigma' > 0 and sigma'' < 0 on the sampling grid",
    ))
    checks.append(HypothesisCheck(
        "M2", bool(w0 > 0 and np.all(w > 0) and np.all(w1 > 0) and np.all(w2 < 0)),
        constant=float(w0),
        detail="w(0) > 0, w' > 0, w'' < 0 on the sampling grid",
    ))

    g_w = beta / (1.0 - beta)
    lhs = w1 * w1
    rhs = -g_w * w2 * w
    sampled = bool(np.all(lhs <= rhs * (1 + _SAMPLE_RTOL)))
    checks.append(HypothesisCheck(
        "W1", sampled and g_w < 0.5, constant=g_w,
        detail=("(w')^2 <= -g_w w'' w sampled: %s; g_w < 1/2: %s" % (sampled, g_w < 0.5)),
    ))

    G_w = (1.0 - beta) / beta
    sampled = bool(np.all(-w2 * w <= G_w * w1 * w1 * (1 + _SAMPLE_RTOL)))
    checks.append(HypothesisCheck(
        "W2", sampled, constant=G_w, detail="-w'' w <= G_w (w')^2 sampled",
    ))

    worst = []
    ok = True
    for c in c_values:
        G_sigma = (1.0 + c) / (beta * c)
        if isinstance(model.sigma, PowerEntropy):
            G_sigma *= 1.0 - model.sigma.alpha
        mask = u >= c
        good = np.all(-s2[mask] * w[mask] <= G_sigma * s1[mask] * w1[mask] * (1 + _SAMPLE_RTOL))
        ok = ok and bool(good)
        worst.append(G_sigma)
    checks.append(HypothesisCheck(
        "W3", ok, constant=worst[0],
        detail="-sigma'' w <= G_sigma(c) sigma' w' on [c, inf) for c in %s" % (list(c_values),),
    ))

    r = model.rate
    if isinstance(r, ConstantRate):
        checks.append(HypothesisCheck("R", r.F0 > 0, constant=r.F0, detail="F = F0 > 0"))
    else:
        checks.append(HypothesisCheck(
            "R", r.k1 > 0, constant=None,
            detail="SRH with k1 > 0; c_F follows from the density ceiling N_max",
        ))
    return HypothesisReport(checks)
