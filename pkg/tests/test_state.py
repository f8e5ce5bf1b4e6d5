import numpy as np
import pytest

from eerd.equilibrium import compute_equilibrium, equilibrium_state
from eerd.errors import ConfigError, PositivityError
from eerd.grid import Grid
from eerd.model import eval_w
from eerd.state import (
    Bounds,
    State,
    charge_tol,
    check_admissible,
    derive_fields,
    read_state_csv,
    write_state_csv,
)
from eerd.verifier import random_admissible_state


def test_state_is_immutable_and_validated():
    s = State([1.0, 2.0], [1.0, 2.0], [1.0, 1.0])
    with pytest.raises(ValueError):
        s.n[0] = 3.0
    with pytest.raises(PositivityError):
        State([1.0, -1.0], [1.0, 1.0], [1.0, 1.0])
    with pytest.raises(ValueError):
        State([1.0], [1.0, 1.0], [1.0, 1.0])
    with pytest.raises(ValueError):
        State([np.nan, 1.0], [1.0, 1.0], [1.0, 1.0])


def test_state_copies_input():
    n = np.ones(3)
    s = State(n, np.ones(3), np.ones(3))
    n[0] = 5.0
    assert s.n[0] == 1.0


def test_bounds_validation():
    with pytest.raises(ValueError):
        Bounds(0.0, 1.0)
    with pytest.raises(ValueError):
        Bounds(1.0, -1.0)


def test_bounds_implied_quantities(ref_model):
    b = Bounds(0.5, 2.0)
    assert b.c_u(ref_model) == pytest.approx(0.5)
    assert b.C_theta(ref_model) == pytest.approx(2.0)
    # w/w' = (1 + u)/beta for the power family
    assert b.N_max(ref_model) == pytest.approx(24.0, rel=1e-14)


def test_temperature_without_densities(ref_model):
    g = Grid(1.0, 8)
    s = State(np.zeros(8), np.zeros(8), np.ones(8))
    d = derive_fields(s, ref_model, g, potentials=False)
    np.testing.assert_allclose(d.theta, 1.0)
    assert d.y_n is None
    with pytest.raises(PositivityError):
        derive_fields(s, ref_model, g)


def test_chemical_potentials_vanish_at_local_equilibrium(ref_model):
    g = Grid(1.0, 16)
    u = 0.5 + g.x
    w = eval_w(ref_model, u)[0]
    d = derive_fields(State(w, w, u), ref_model, g)
    np.testing.assert_allclose(d.y_n, 0.0, atol=1e-15)
    np.testing.assert_allclose(d.y_p, 0.0, atol=1e-15)
    np.testing.assert_array_equal(d.psi, 0.0)


def test_derived_fields_formulas(ref_model, grid64):
    rng = np.random.default_rng(3)
    n, p, u = rng.uniform(0.5, 2, 64), rng.uniform(0.5, 2, 64), rng.uniform(0.5, 2, 64)
    p += (n - p).mean()
    d = derive_fields(State(n, p, u), ref_model, grid64)
    beta = 0.25
    r = beta / (1 + u)
    np.testing.assert_allclose(1 / d.theta, 1 / u + (n + p) * r, rtol=1e-14)
    # -w''/w = beta (1 - beta) / (1 + u)^2
    np.testing.assert_allclose(d.gamma, 1 / u**2 + (n + p) * beta * (1 - beta) / (1 + u) ** 2, rtol=1e-14)
    assert abs(grid64.h * d.psi.sum()) < 1e-14
    d2 = derive_fields(State(n, p, u), ref_model, grid64)
    for a, b in ((d.theta, d2.theta), (d.gamma, d2.gamma), (d.psi, d2.psi), (d.y_n, d2.y_n)):
        assert a.tobytes() == b.tobytes()


def test_derive_fields_rejects_zero_energy(ref_model):
    g = Grid(1.0, 4)
    with pytest.raises(PositivityError):
        derive_fields(State(np.ones(4), np.ones(4), [1, 1, 0, 1]), ref_model, g, potentials=False)


def test_equilibrium_is_admissible(ref_model, grid64, ref_eq):
    rep = check_admissible(equilibrium_state(ref_eq, grid64), Bounds(0.5, 2.0), ref_model, grid64)
    assert rep.admissible
    assert rep.to_dict()["admissible"] is True


def test_energy_ceiling_violation(ref_model, grid64, ref_eq):
    s = equilibrium_state(ref_eq, grid64)
    u = s.u.copy()
    u[5] = 4.0
    rep = check_admissible(s.copy_with(u=u), Bounds(0.5, 2.0), ref_model, grid64)
    assert not rep.energy_ceiling and not rep.admissible


def test_charge_violation_reported(ref_model, grid64, ref_eq):
    s = equilibrium_state(ref_eq, grid64)
    rep = check_admissible(s.copy_with(p=s.p * 1.01), Bounds(0.5, 2.0), ref_model, grid64)
    assert not rep.charge_compatible


def test_zero_energy_reported_not_raised(ref_model):
    g = Grid(1.0, 4)
    rep = check_admissible(State(np.ones(4), np.ones(4), [1, 1, 0, 1]), Bounds(0.5, 2.0), ref_model, g)
    assert not rep.positive and not rep.admissible


def test_charge_tol_scale():
    g = Grid(1.0, 4)
    assert charge_tol(State(np.full(4, 10.0), np.ones(4), np.ones(4)), g) == pytest.approx(1e-11)
    assert charge_tol(State(np.zeros(4), np.zeros(4), np.ones(4)), g) == 1e-12


@pytest.mark.parametrize("seed", range(25))
def test_admissible_states_respect_implied_bounds(seed, ref_model):
    g = Grid(1.0, 128)
    b = Bounds(0.5, 2.0)
    eq = compute_equilibrium(1.0, 0.0, g, ref_model)
    s = random_admissible_state(seed, g, ref_model, b, eq, 0.9)
    rep = check_admissible(s, b, ref_model, g)
    assert rep.admissible
    assert rep.c_u <= rep.u_min and rep.u_max <= b.C_u
    assert b.c_theta <= rep.theta_min and rep.theta_max <= rep.C_theta
    assert max(s.n.max(), s.p.max()) <= rep.N_max


def test_state_csv_roundtrip(tmp_path, ref_model, grid64, ref_eq):
    s = random_admissible_state(1, grid64, ref_model, Bounds(0.5, 2.0), ref_eq, 0.3)
    path = tmp_path / "s.csv"
    write_state_csv(path, s, grid64)
    assert path.read_text().splitlines()[0] == "x,n,p,u"
    back = read_state_csv(path, grid64)
    for a, b in ((s.n, back.n), (s.p, back.p), (s.u, back.u)):
        assert a.tobytes() == b.tobytes()


def test_state_csv_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("x,n,q,u\n0,1,1,1\n")
    with pytest.raises(ConfigError):
        read_state_csv(bad)
    short = tmp_path / "short.csv"
    short.write_text("x,n,p,u\n0.5,1,1,1\n")
    with pytest.raises(ConfigError):
        read_state_csv(short, Grid(1.0, 2))
