"""Acceptance criteria, each evaluated at its stated tolerance.

Every test records one pass/fail line that is printed in the terminal
summary of the session.  The long runs are shared through module-scoped
fixtures.
"""

import json

import numpy as np
import pytest

from eerd.cli import main
from eerd.grid import Grid, integrate
from eerd.pipeline import distance_to_equilibrium, setup, simulate
from eerd.poisson import field_energy, solve_poisson
from eerd.scenarios import NAMES, load, load_all
from eerd.verifier import (
    battery,
    check_entropy_production_law,
    check_state_inequalities,
    ckp_lower_bound,
    random_admissible_state,
    scalar_inequality_suite,
)

from conftest import record_criterion
from oracles import reference

pytestmark = pytest.mark.acceptance


@pytest.fixture(scope="module")
def setups():
    return {name: setup(load(name)) for name in NAMES}


@pytest.fixture(scope="module")
def runs_20(setups):
    """``t_end = 20/rate`` at N = 256 with cfl 0.2 and 0.1."""
    out = {}
    for name, st in setups.items():
        t_end = 20.0 / st.ec.rate
        out[name] = (simulate(st, t_end=t_end, cfl=0.2), simulate(st, t_end=t_end, cfl=0.1))
    return out


@pytest.fixture(scope="module")
def runs_40(setups):
    return {name: simulate(st, t_end=40.0 / st.ec.rate) for name, st in setups.items()}


def test_criterion_1_conservation(setups, runs_20):
    details, ok = [], True
    for name, (a, b) in runs_20.items():
        q = np.max(np.abs(a.Q - a.Q[0]))
        e_a = np.max(np.abs(a.E - a.E[0])) / a.E[0]
        e_b = np.max(np.abs(b.E - b.E[0])) / b.E[0]
        ratio = e_b / e_a
        good = q <= 1e-12 and np.max(np.abs(b.Q - b.Q[0])) <= 1e-12 and e_a <= 1e-3 and 0.4 <= ratio <= 0.6
        ok &= bool(good)
        details.append(f"{name} dQ={q:.1e} dE/E={e_a:.2e} halving ratio={ratio:.3f}")
    record_criterion(1, "charge and energy conservation", ok, "; ".join(details))
    assert ok


def test_criterion_2_entropy_production_law(setups, runs_20):
    details, ok = [], True
    for name in NAMES:
        cfg = load(name)
        errs = []
        # comparable sample spacing: dt scales with h^2
        for N, every in ((64, 20), (128, 80), (256, 320)):
            tr = simulate(setup(cfg, N=N), t_end=0.5, sample_every=every)
            errs.append(check_entropy_production_law(tr).lhs)
        full = check_entropy_production_law(runs_20[name][0])
        good = full.passed and errs[-1] <= 0.05 and errs[0] > errs[1] > errs[2]
        ok &= bool(good)
        details.append(f"{name} N=256 median={full.lhs:.1e}, refinement {errs[0]:.1e}>{errs[1]:.1e}>{errs[2]:.1e}")
    record_criterion(2, "entropy production law", ok, "; ".join(details))
    assert ok


def test_criterion_3_eep_inequality():
    scen = load_all()
    rep = battery(scen, 1000, 11, margin=1.1)
    names = ("eep", "entropy_upper_bound", "production_lower_bound")
    summ = rep.summary()
    states = summ["eep"]["checks"]
    fails = {k: summ[k]["failures"] for k in names}
    ok = states >= 1000 and len(scen) >= 3 and all(v == 0 for v in fails.values())
    worst = ", ".join(f"{k} worst ratio {summ[k]['worst_ratio']:.2e}" for k in names)
    record_criterion(3, "EEP inequality and quadratic sandwich", ok,
                     f"{states} states over {len(scen)} scenarios, failures {fails}; {worst}")
    assert ok


def test_criterion_4_exponential_decay(setups, runs_20):
    details, ok = [], True
    from eerd.simulator import fitted_decay_rate

    for name, (tr, _) in runs_20.items():
        st = setups[name]
        env = bool(np.all(tr.H <= tr.envelope * (1 + 1e-12)))
        fitted = fitted_decay_rate(tr)
        rate_ok = fitted is not None and fitted >= st.ec.rate
        cor = bool(np.all(tr.corollary_lhs <= tr.corollary_bound * (1 + 1e-12)))
        ok &= env and rate_ok and cor
        margin = np.min(np.log(tr.envelope[1:]) - np.log(np.maximum(tr.H[1:], 1e-300)))
        details.append(f"{name} envelope={'ok' if env else 'violated'} (min log margin {margin:.1f}) "
                       f"fitted rate={fitted:.3g} >= {st.ec.rate:.3g}, corollary={'ok' if cor else 'violated'}")
    record_criterion(4, "exponential decay at t_end = 20/rate", ok, "; ".join(details))
    assert ok


def test_criterion_5_equilibrium_structure(setups, runs_40):
    details, ok = [], True
    for name, tr in runs_40.items():
        st = setups[name]
        d = distance_to_equilibrium(tr.final_state, st.eq, st.grid)
        ok &= d <= 1e-6 and tr.t[-1] == pytest.approx(40.0 / st.ec.rate)
        details.append(f"{name} distance={d:.2e}")
    record_criterion(5, "long-time state at t = 40/rate", ok, "; ".join(details))
    assert ok


def test_criterion_6_auxiliary_inequalities():
    counts, failures = {}, {}
    for i, cfg in enumerate(load_all()):
        for rec in scalar_inequality_suite(10_000, 100 + i, cfg.model):
            counts[rec.name] = counts.get(rec.name, 0) + rec.detail["samples"]
            failures[rec.name] = failures.get(rec.name, 0) + rec.detail["failures"]

    rng = np.random.default_rng(6)
    g = Grid(1.0, 64)
    ckp_fail = 0
    for _ in range(10_000):
        f = rng.uniform(0, 3, 64) * (1 + np.cos(np.pi * rng.integers(1, 6) * g.x))
        gf = rng.uniform(0.05, 3, 64)
        ckp_fail += not ckp_lower_bound(f, gf, g).passed
    counts["ckp"], failures["ckp"] = 10_000, ckp_fail

    scen = load_all()
    per = [3334, 3333, 3333]
    from eerd.constants import compute_eep_constants, compute_hypothesis_constants
    from eerd.equilibrium import compute_equilibrium

    for name in ("dissipative_lower_bound", "inverse_temperature_gradient"):
        counts[name] = failures[name] = 0
    for i, cfg in enumerate(scen):
        vg = cfg.verify_grid
        eq = compute_equilibrium(cfg.E0, 0.0, vg, cfg.model)
        hc = compute_hypothesis_constants(cfg.bounds, cfg.model, vg)
        ec = compute_eep_constants(hc, eq, cfg.model)
        for k in range(per[i]):
            seed = int(np.random.SeedSequence([66, i, k]).generate_state(1)[0])
            s = random_admissible_state(seed, vg, cfg.model, cfg.bounds, eq, cfg.verify_amplitude)
            for rec in check_state_inequalities(s, ec, hc, cfg.model, vg, eq, 1.1)[3:]:
                counts[rec.name] += 1
                failures[rec.name] += not rec.passed
    ok = all(v == 0 for v in failures.values()) and all(v >= 10_000 for v in counts.values())
    record_criterion(6, "auxiliary inequalities", ok,
                     ", ".join(f"{k} {failures[k]}/{counts[k]}" for k in counts))
    assert ok


def test_criterion_7_constants_match_oracle(tmp_path, capsys):
    code = main(["constants", "--config", "reference", "--out", str(tmp_path)])
    doc = json.loads(capsys.readouterr().out)
    c = {k: v["value"] for k, v in doc["constants"].items()}
    o = reference(u_inf=1.0, H0=c["H0"])
    keys = ("c_u", "N_max", "K_sigma", "k_sigma", "C1", "C2_tilde", "C2", "C3")
    rel = {k: abs(c[k] - o[k]) / abs(o[k]) for k in keys}
    ok = code == 0 and all(v <= 1e-12 for v in rel.values())
    record_criterion(7, "constants against hand oracle", ok,
                     ", ".join(f"{k}={c[k]:.12g} (rel {rel[k]:.0e})" for k in keys))
    assert ok


def test_criterion_8_poisson():
    errs = []
    for N in (32, 64, 128, 256, 512):
        g = Grid(1.0, N)
        c = np.cos(np.pi * g.x)
        psi = solve_poisson(g, 1 - c / 2, 1 + c / 2)
        errs.append(np.max(np.abs(psi - c / np.pi**2)))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    rng = np.random.default_rng(8)
    worst = 0.0
    for N in (16, 64, 256, 512):
        for amp in (0.0, 0.5, 0.9):
            x = (np.arange(N) + 0.5) / N
            g = Grid(1.0, N, 1.0 + amp * np.cos(5 * x))
            n, p = rng.uniform(0.5, 2, N), rng.uniform(0.5, 2, N)
            p += (n - p).mean()
            psi = solve_poisson(g, n, p)
            lhs, rhs = field_energy(g, psi), integrate(g, (p - n) * psi)
            worst = max(worst, abs(lhs - rhs) / abs(rhs))
    ok = bool(np.all(np.abs(orders - 2) < 0.1)) and worst <= 1e-12
    record_criterion(8, "Poisson solver", ok,
                     f"orders {', '.join(f'{o:.3f}' for o in orders)}; energy identity rel error {worst:.1e}")
    assert ok
