import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eerd.equilibrium import Equilibrium, compute_equilibrium, equilibrium_state, verify_equilibrium
from eerd.errors import ChargeCompatibilityError, DomainError
from eerd.functionals import reactive_entropy_term
from eerd.grid import Grid
from eerd.model import ConstantRate, LogEntropy, ModelFunctions, PowerEntropy, PowerWeight, eval_w

M = ModelFunctions(LogEntropy(1.0), PowerWeight(1.0, 0.25), ConstantRate(1.0))


def test_closed_form_example():
    eq = compute_equilibrium(2.0, 0.0, Grid(1.0, 16), M)
    assert eq.u_inf == 2.0
    assert eq.n_inf == eq.p_inf == pytest.approx(3**0.25, rel=1e-15)
    assert 1 / eq.theta_inf == pytest.approx(0.5 + 0.5 * 3**-0.75, rel=1e-15)
    assert 1 / eq.theta_inf == pytest.approx(0.7193, abs=1e-4)
    assert eq.eta == pytest.approx(1 / eq.theta_inf)
    assert eq.psi_inf == 0.0 and eq.kappa == 0.0


def test_volume_scaling():
    assert compute_equilibrium(2.0, 0.0, Grid(2.0, 16), M).u_inf == 1.0


def test_errors():
    g = Grid(1.0, 8)
    with pytest.raises(ChargeCompatibilityError):
        compute_equilibrium(1.0, 0.1, g, M)
    with pytest.raises(DomainError):
        compute_equilibrium(0.0, 0.0, g, M)


@given(st.floats(0.05, 20.0), st.sampled_from([LogEntropy(1.0), PowerEntropy(2.0, 0.5)]), st.floats(0.5, 3.0))
def test_verification_passes_and_detailed_balance(E0, sigma, L):
    m = ModelFunctions(sigma, PowerWeight(1.3, 0.3), ConstantRate(2.0))
    g = Grid(L, 32)
    eq = compute_equilibrium(E0, 0.0, g, m)
    assert eq.n_inf * eq.p_inf == eval_w(m, eq.u_inf)[0] ** 2
    rep = verify_equilibrium(eq, m, g)
    assert rep["passed"], rep
    s = equilibrium_state(eq, g)
    # vectorised and scalar pow may differ by an ulp in w(u_inf)
    assert np.max(reactive_entropy_term(s.n, s.p, s.u, m)) <= 1e-28 * eq.n_inf**2


def test_perturbed_equilibrium_fails_energy_check():
    g = Grid(1.0, 16)
    eq = compute_equilibrium(2.0, 0.0, g, M)
    w = eval_w(M, 2.001)[0]
    bad = Equilibrium(u_inf=2.001, n_inf=w, p_inf=w, theta_inf=eq.theta_inf, E0=2.0)
    rep = verify_equilibrium(bad, M, g)
    assert not rep["energy"]["passed"]
    assert not rep["passed"]


def test_to_dict_keys():
    d = compute_equilibrium(1.0, 0.0, Grid(1.0, 4), M).to_dict()
    assert list(d) == ["u_inf", "n_inf", "p_inf", "theta_inf", "psi_inf", "eta", "kappa", "E0"]
