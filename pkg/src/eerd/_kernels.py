"""Compiled inner loops for the explicit integrator.

Mirrors the numpy reference path in :mod:`eerd.poisson` and
:mod:`eerd.simulator` (same face averaging, same Joule-term split) so a
long run costs microseconds per step.  Model parameters travel as a flat
float array, see :func:`pack_params`.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .model import ConstantRate, LogEntropy, ModelFunctions

# advance() status codes
REACHED_STOP = 0
REACHED_MAX_STEPS = 1
STEADY = 2
FAILED = 3


def pack_params(model: ModelFunctions) -> np.ndarray:
    s, w, r = model.sigma, model.weight, model.rate
    if isinstance(s, LogEntropy):
        sig = (0.0, s.a, 0.0)
    else:
        sig = (1.0, s.a, s.alpha)
    if isinstance(r, ConstantRate):
        rate = (0.0, r.F0, 0.0, 0.0, 0.0)
    else:
        rate = (1.0, 0.0, r.k1, r.k2, r.k3)
    return np.array(sig + (w.b, w.beta) + rate, dtype=np.float64)


@njit(cache=True)
def poisson_solve(eps_f, rho, h, psi):
    """Zero-mean Neumann solve of ``-div(eps grad psi) = rho``.

    The flux through each face is the charge accumulated to its left, so
    ``psi`` follows from two running sums (same arithmetic as the numpy
    path).
    """
    N = rho.shape[0]
    flux = 0.0
    psi[0] = 0.0
    for i in range(N - 1):
        flux += h * rho[i]
        psi[i + 1] = psi[i] + h * (-flux / eps_f[i])
    mean = 0.0
    for i in range(N):
        mean += psi[i]
    mean /= N
    for i in range(N):
        psi[i] -= mean


@njit(cache=True)
def _cell_coefficients(n, p, u, prm, theta, gamma, ratio, R):
    sk, a, alpha, b, beta = prm[0], prm[1], prm[2], prm[3], prm[4]
    rk, F0, k1, k2, k3 = prm[5], prm[6], prm[7], prm[8], prm[9]
    for i in range(n.shape[0]):
        ui = u[i]
        if sk == 0.0:
            s1 = a / ui
            s2 = -a / (ui * ui)
        else:
            ua = ui ** alpha
            s1 = a * alpha * ua / ui
            s2 = a * alpha * (alpha - 1.0) * ua / (ui * ui)
        v = 1.0 + ui
        w = b * v ** beta
        r = beta / v
        w2w = beta * (beta - 1.0) / (v * v)
        c = n[i] + p[i]
        theta[i] = 1.0 / (s1 + c * r)
        gamma[i] = -s2 - c * w2w
        ratio[i] = r
        if rk == 0.0:
            F = F0
        else:
            F = 1.0 / (k1 + k2 * n[i] + k3 * p[i])
        R[i] = F * (w * w - n[i] * p[i])


@njit(cache=True)
def rhs_kernel(n, p, u, prm, eps_f, h, dn, dp_, du, work):
    """Evaluate the semi-discrete right-hand side; return the step scale D_max.

    ``work`` is a ``(6, N)`` scratch array.
    """
    N = n.shape[0]
    theta = work[0]
    gamma = work[1]
    ratio = work[2]
    R = work[3]
    psi = work[4]
    rho = work[5]
    _cell_coefficients(n, p, u, prm, theta, gamma, ratio, R)
    for i in range(N):
        rho[i] = p[i] - n[i]
    poisson_solve(eps_f, rho, h, psi)

    for i in range(N):
        dn[i] = R[i]
        dp_[i] = R[i]
        du[i] = 0.0

    dmax = 1.0
    rk = prm[5]
    for i in range(N):
        F_scale = h * h * (n[i] + p[i]) * (prm[6] if rk == 0.0 else 1.0 / prm[7])
        if F_scale > dmax:
            dmax = F_scale

    for i in range(N - 1):
        nf = 0.5 * (n[i] + n[i + 1])
        pf = 0.5 * (p[i] + p[i + 1])
        tf = 0.5 * (theta[i] + theta[i + 1])
        gf = 0.5 * (gamma[i] + gamma[i + 1])
        rf = 0.5 * (ratio[i] + ratio[i + 1])
        Dn = (n[i + 1] - n[i]) / h
        Dp = (p[i + 1] - p[i]) / h
        Du = (u[i + 1] - u[i]) / h
        Dpsi = (psi[i + 1] - psi[i]) / h
        A = (nf - pf) / gf * rf * rf
        jn = -Dn + nf / tf * (1.0 + A) * Dpsi
        jp = -Dp - pf / tf * (1.0 - A) * Dpsi
        ju = -Du + (nf - pf) / gf * rf / tf * Dpsi
        J = 0.5 * (jn - jp) * Dpsi
        # flux leaves cell i, enters cell i+1
        dn[i] -= jn / h
        dn[i + 1] += jn / h
        dp_[i] -= jp / h
        dp_[i + 1] += jp / h
        du[i] -= ju / h
        du[i + 1] += ju / h
        du[i] += J
        du[i + 1] += J

        absA = abs(A)
        drift = h * abs(Dpsi) * (1.0 + absA) / tf
        if drift > dmax:
            dmax = drift
        relax = h * h * (nf + pf) * (1.0 + absA) / (tf * eps_f[i])
        if relax > dmax:
            dmax = relax
    return dmax


@njit(cache=True)
def admissible(n, p, u, prm, floor, c_theta, C_u):
    sk, a, alpha, beta = prm[0], prm[1], prm[2], prm[4]
    inv_ct = 1.0 / c_theta
    for i in range(n.shape[0]):
        ui = u[i]
        if not (n[i] >= floor and p[i] >= floor and ui >= floor):
            return False
        if ui > C_u:
            return False
        if sk == 0.0:
            s1 = a / ui
        else:
            s1 = a * alpha * ui ** alpha / ui
        if s1 + (n[i] + p[i]) * beta / (1.0 + ui) > inv_ct:
            return False
    return True


@njit(cache=True)
def advance(n, p, u, prm, eps_f, h, t, t_stop, max_steps, dt_prev, cfl,
            floor, c_theta, C_u, steady_tol, max_halvings):
    """Explicit Euler with step rejection, in place on ``(n, p, u)``.

    Returns ``(status, t, steps, dt_last, rhs_norm)``.
    """
    N = n.shape[0]
    dn = np.empty(N)
    dp_ = np.empty(N)
    du = np.empty(N)
    nt = np.empty(N)
    pt = np.empty(N)
    ut = np.empty(N)
    work = np.empty((6, N))
    steps = 0
    rhs_norm = 0.0
    while True:
        dmax = rhs_kernel(n, p, u, prm, eps_f, h, dn, dp_, du, work)
        rhs_norm = 0.0
        for i in range(N):
            m = max(abs(dn[i]), abs(dp_[i]), abs(du[i]))
            if m > rhs_norm:
                rhs_norm = m
        if steady_tol > 0.0 and rhs_norm <= steady_tol:
            return STEADY, t, steps, dt_prev, rhs_norm
        dt = min(cfl * h * h / dmax, 2.0 * dt_prev, t_stop - t)
        accepted = False
        for _ in range(max_halvings + 1):
            for i in range(N):
                nt[i] = n[i] + dt * dn[i]
                pt[i] = p[i] + dt * dp_[i]
                ut[i] = u[i] + dt * du[i]
            if admissible(nt, pt, ut, prm, floor, c_theta, C_u):
                accepted = True
                break
            dt *= 0.5
        if not accepted:
            return FAILED, t, steps, dt, rhs_norm
        for i in range(N):
            n[i] = nt[i]
            p[i] = pt[i]
            u[i] = ut[i]
        steps += 1
        dt_prev = dt
        if t_stop - t <= dt:
            t = t_stop
            return REACHED_STOP, t, steps, dt_prev, rhs_norm
        t += dt
        if steps >= max_steps:
            return REACHED_MAX_STEPS, t, steps, dt_prev, rhs_norm
