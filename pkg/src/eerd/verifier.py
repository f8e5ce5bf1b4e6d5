"""Randomized and deterministic checks of the functional inequalities.

Every check produces a :class:`CheckRecord` that passes iff
``lhs <= rhs * margin + atol``.  Lower bounds are recorded with the
smaller side as ``lhs``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .constants import EEPConstants, HypothesisConstants
from .errors import DomainError, GenerationFailure, InsufficientSamples
from .functionals import (
    dissipative_lower_bound_rhs,
    entropy_production,
    face_coefficients,
    inv_temp_gradient_functional,
    relative_entropy,
)
from .grid import Grid, integrate
from .model import ModelFunctions, boltzmann, eval_w, relative_boltzmann
from .poisson import field_energy, solve_poisson
from .state import Bounds, State, check_admissible

DEFAULT_MARGIN = 1.1
N_MODES = 5


@dataclass
class CheckRecord:
    name: str
    digest: str
    lhs: float
    rhs: float
    margin: float = 1.0
    atol: float = 0.0
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.lhs <= self.rhs * self.margin + self.atol)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "digest": self.digest,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "passed": self.passed,
            **({"detail": self.detail} if self.detail else {}),
        }


@dataclass
class VerificationReport:
    records: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    def add(self, rec: CheckRecord, state: State | None = None):
        self.records.append(rec)
        if not rec.passed:
            entry = rec.to_dict()
            if state is not None:
                entry["state"] = {"n": state.n.tolist(), "p": state.p.tolist(), "u": state.u.tolist()}
            self.failures.append(entry)

    def extend(self, other: "VerificationReport"):
        self.records.extend(other.records)
        self.failures.extend(other.failures)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def summary(self) -> dict:
        out = {}
        for r in self.records:
            s = out.setdefault(r.name, {"checks": 0, "failures": 0, "worst_ratio": 0.0})
            s["checks"] += 1
            s["failures"] += int(not r.passed)
            if r.rhs > 0:
                s["worst_ratio"] = max(s["worst_ratio"], r.lhs / r.rhs)
        return out

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": len(self.records),
            "failed": sum(not r.passed for r in self.records),
            "summary": self.summary(),
            "failures": self.failures,
        }


def state_digest(s: State) -> str:
    h = hashlib.sha256()
    for a in (s.n, s.p, s.u):
        h.update(np.ascontiguousarray(a, dtype="<f8").tobytes())
    return h.hexdigest()[:16]


def _random_mode_field(rng: np.random.Generator, g: Grid) -> np.ndarray:
    """Zero-mean combination of the first cosine modes, sup-norm 1."""
    coef = rng.uniform(-1.0, 1.0, N_MODES)
    k = np.arange(1, N_MODES + 1)
    phi = np.cos(np.pi * np.outer(g.x, k) / g.L) @ coef
    top = np.max(np.abs(phi))
    return phi / top if top > 0 else phi


def random_admissible_state(seed: int, g: Grid, m: ModelFunctions, b: Bounds, eq,
                            amplitude: float, retries: int = 20) -> State:
    """Seeded smooth perturbation of the equilibrium.

    ``n``, ``p`` and ``u`` are multiplied by ``1 + a * phi`` with random
    low-mode fields ``phi`` and amplitudes ``a ~ U(0, amplitude)``.  Then
    ``p`` is shifted to make the net charge vanish and ``u`` is shifted by
    the field energy per volume so that the total energy equals
    ``|Omega| u_inf``: the state lies on the same energy and charge level
    as ``eq``.  On an inadmissible draw the amplitude is halved.

    Raises
    ------
    GenerationFailure
        If no admissible state is found within ``retries`` halvings.
    """
    if not 0.0 <= amplitude < 1.0:
        raise DomainError(f"amplitude must lie in [0, 1), got {amplitude}")
    rng = np.random.default_rng(seed)
    phis = [_random_mode_field(rng, g) for _ in range(3)]
    amps = rng.uniform(0.0, amplitude, 3) if amplitude > 0 else np.zeros(3)
    scale = 1.0
    for _ in range(retries + 1):
        a_n, a_p, a_u = amps * scale
        n = eq.n_inf * (1.0 + a_n * phis[0])
        p = eq.p_inf * (1.0 + a_p * phis[1])
        p = p + integrate(g, n - p) / g.volume
        u = eq.u_inf * (1.0 + a_u * phis[2])
        if np.all(n > 0) and np.all(p > 0):
            psi = solve_poisson(g, n, p)
            u = u - 0.5 * field_energy(g, psi) / g.volume
            if np.all(u > 0):
                s = State(n, p, u)
                if check_admissible(s, b, m, g).admissible:
                    return s
        scale *= 0.5
    raise GenerationFailure(f"no admissible state after {retries} amplitude halvings (seed {seed})")


def quadratic_distance(s: State, eq, g: Grid) -> float:
    """``int (n - n_inf)^2 + (p - p_inf)^2 + (u - u_inf)^2``."""
    return integrate(g, (s.n - eq.n_inf) ** 2 + (s.p - eq.p_inf) ** 2 + (s.u - eq.u_inf) ** 2)


def check_eep(s: State, consts: EEPConstants, m: ModelFunctions, g: Grid, eq,
              margin: float = DEFAULT_MARGIN, H=None, P=None) -> CheckRecord:
    """``H <= C1 C2 P`` up to ``margin``."""
    if H is None:
        H = relative_entropy(s, eq, m, g)
    if P is None:
        P = entropy_production(s, m, g)
    return CheckRecord("eep", state_digest(s), H, consts.C1 * consts.C2 * P, margin,
                       detail={"H": H, "P": P})


def check_quadratic_sandwich(s: State, consts: EEPConstants, m: ModelFunctions, g: Grid, eq,
                             margin: float = DEFAULT_MARGIN, H=None, P=None) -> tuple[CheckRecord, CheckRecord]:
    """``H <= C1 Q`` and ``Q <= C2 P`` with ``Q`` the quadratic distance."""
    if H is None:
        H = relative_entropy(s, eq, m, g)
    if P is None:
        P = entropy_production(s, m, g)
    Q = quadratic_distance(s, eq, g)
    d = state_digest(s)
    return (
        CheckRecord("entropy_upper_bound", d, H, consts.C1 * Q, margin, detail={"Q": Q}),
        CheckRecord("production_lower_bound", d, Q, consts.C2 * P, margin, detail={"P": P}),
    )


def ckp_lower_bound(f, gf, grid: Grid) -> CheckRecord:
    """``int f log(f/g) - f + g >= 3 ||f - g||_1^2 / (2 ||f||_1 + 4 ||g||_1)``."""
    f = np.asarray(f, dtype=float)
    gf = np.asarray(gf, dtype=float)
    if np.any(f < 0) or np.any(gf <= 0):
        raise DomainError("need f >= 0 and g > 0")
    rel = integrate(grid, relative_boltzmann(f, gf))
    l1f, l1g = integrate(grid, f), integrate(grid, gf)
    bound = 3.0 * integrate(grid, np.abs(f - gf)) ** 2 / (2.0 * l1f + 4.0 * l1g)
    digest = hashlib.sha256(f.tobytes() + gf.tobytes()).hexdigest()[:16]
    return CheckRecord("ckp", digest, bound, rel, 1.0, atol=1e-15 * max(1.0, rel))


def _suite_record(name: str, seed, lower, upper) -> CheckRecord:
    """Aggregate ``lower <= upper`` over samples into one record (worst sample)."""
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    tol = 1e-12 * np.maximum(np.abs(lower), np.abs(upper)) + 1e-300
    slack = upper - lower + tol
    k = int(np.argmin(slack))
    failures = int(np.sum(slack < 0))
    return CheckRecord(name, f"seed={seed}", float(lower[k]), float(upper[k]), 1.0,
                       atol=float(tol[k]), detail={"samples": int(lower.size), "failures": failures})


def scalar_inequality_suite(sample_count: int, seed: int, m: ModelFunctions | None = None) -> list:
    """Elementary inequalities on seeded random inputs.

    Checks ``(x - y) log(x/y) >= 4 (sqrt x - sqrt y)^2``,
    ``lambda(z) <= (z - 1)^2`` and, if a model is given, the two
    consequences of the weight concavity bound at random ``u``.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    rng = np.random.default_rng(seed)
    x = 10.0 ** rng.uniform(-6, 6, sample_count)
    y = x * 10.0 ** rng.uniform(-3, 3, sample_count)
    lhs = (x - y) * (np.log(x) - np.log(y))
    rhs = 4.0 * (np.sqrt(x) - np.sqrt(y)) ** 2
    out = [_suite_record("log_mean_sqrt", seed, rhs, lhs)]

    z = np.concatenate(([0.0, 1.0], 10.0 ** rng.uniform(-6, 3, sample_count - 2)))[:sample_count]
    out.append(_suite_record("boltzmann_quadratic", seed, boltzmann(z), (z - 1.0) ** 2))

    if m is not None:
        beta = m.weight.beta
        g_w = beta / (1.0 - beta)
        u = 10.0 ** rng.uniform(-6, 6, sample_count)
        w, w1, w2 = eval_w(m, u)
        r = w1 / w
        c = g_w + 0.5
        out.append(_suite_record("weight_bound_a", seed, (2.0 / c) * r * r, c * (r * r - w2 / w)))
        out.append(_suite_record("weight_bound_b", seed, np.full(u.shape, 0.5 - g_w),
                                 1.0 + (2.0 / c) * r * r * w / w2))
    return out


def check_state_inequalities(s: State, consts: EEPConstants, hc: HypothesisConstants, m: ModelFunctions,
                             g: Grid, eq, margin: float = DEFAULT_MARGIN) -> list:
    """EEP, both sandwich halves, the gradient lower bound and the inverse
    temperature bound on one state."""
    fc = face_coefficients(s, m, g)
    from .functionals import entropy_production_terms

    P = float(sum(entropy_production_terms(s, m, g, fc).values()))
    H = relative_entropy(s, eq, m, g, fc.psi)
    recs = [check_eep(s, consts, m, g, eq, margin, H, P)]
    recs.extend(check_quadratic_sandwich(s, consts, m, g, eq, margin, H, P))
    G = max(hc.G_sigma, hc.G_w)
    lemma = dissipative_lower_bound_rhs(s, m, g, hc.g_w, fc)
    factor = 1.0 + 2.0 * G**2 * (hc.g_w + 0.5)
    d = recs[0].digest
    recs.append(CheckRecord("dissipative_lower_bound", d, lemma, factor * P, margin))
    recs.append(CheckRecord("inverse_temperature_gradient", d,
                            inv_temp_gradient_functional(s, m, g, fc), 2.0 * P, margin))
    return recs


def check_entropy_production_law(traj, tol: float = 0.05, resolved: float = 1e-6) -> CheckRecord:
    """Centered difference of the total entropy against the recorded production.

    Only dynamically integrated samples are used (all samples if fewer than
    three were integrated before the run froze); interior samples whose
    production is below ``resolved * max(P)`` are skipped as unresolved.
    Passes if the median relative error is at most ``tol``; a trajectory
    with no resolved sample (flat at equilibrium) passes trivially.

    Raises
    ------
    InsufficientSamples
        If fewer than three samples are available.
    """
    if len(traj.t) < 3:
        raise InsufficientSamples(f"need at least 3 samples, got {len(traj.t)}")
    live = ~np.asarray(traj.frozen, dtype=bool) if traj.frozen is not None else np.ones(len(traj.t), bool)
    if live.sum() < 3:
        # stationary almost from the start: the frozen samples are the trajectory
        live[:] = True
    t, S, P = traj.t[live], traj.S[live], traj.P[live]
    dS = (S[2:] - S[:-2]) / (t[2:] - t[:-2])
    Pk = P[1:-1]
    scale = np.max(P) if P.size else 0.0
    ok = Pk > resolved * scale if scale > 0 else np.zeros(Pk.shape, bool)
    if not np.any(ok):
        return CheckRecord("entropy_production_law", "trajectory", 0.0, tol, 1.0,
                           detail={"resolved_samples": 0, "median_rel_error": 0.0})
    err = np.abs(dS[ok] - Pk[ok]) / Pk[ok]
    med = float(np.median(err))
    return CheckRecord("entropy_production_law", "trajectory", med, tol, 1.0,
                       detail={"resolved_samples": int(ok.sum()), "median_rel_error": med,
                               "max_rel_error": float(err.max())})


def battery(scenarios, states: int, seed: int, margin: float = DEFAULT_MARGIN,
            amplitude: float | None = None) -> VerificationReport:
    """Run the state-level checks on ``states`` random states per scenario.

    Each scenario needs ``.name``, ``.model``, ``.verify_grid``,
    ``.bounds``, ``.E0`` and ``.verify_amplitude``.  State ``k`` of scenario ``i`` uses
    the seed ``(seed, i, k)``.
    """
    from .constants import compute_eep_constants, compute_hypothesis_constants
    from .equilibrium import compute_equilibrium

    report = VerificationReport()
    for i, sc in enumerate(scenarios):
        g, m, b = sc.verify_grid, sc.model, sc.bounds
        eq = compute_equilibrium(sc.E0, 0.0, g, m)
        hc = compute_hypothesis_constants(b, m, g)
        ec = compute_eep_constants(hc, eq, m)
        amp = sc.verify_amplitude if amplitude is None else amplitude
        for k in range(states):
            ss = np.random.SeedSequence([seed, i, k])
            s = random_admissible_state(int(ss.generate_state(1)[0]), g, m, b, eq, amp)
            for rec in check_state_inequalities(s, ec, hc, m, g, eq, margin):
                rec.detail["scenario"] = sc.name
                report.add(rec, s)
    return report
