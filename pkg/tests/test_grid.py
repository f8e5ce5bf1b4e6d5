import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from eerd.grid import (
    Grid,
    divergence_of_face_flux,
    face_average,
    face_gradient,
    face_to_cells,
    integrate,
    integrate_faces,
    poincare_constant,
)


def test_geometry():
    g = Grid(2.0, 4)
    assert g.h == 0.5
    np.testing.assert_allclose(g.x, [0.25, 0.75, 1.25, 1.75])
    np.testing.assert_allclose(g.x_faces, [0.5, 1.0, 1.5])
    assert g.volume == 2.0


@pytest.mark.parametrize("args", [(0.0, 10), (1.0, 1), (1.0, 2.5), (1.0, 4, [1, 1, 1]), (1.0, 3, [1, 0, 1])])
def test_invalid_grid(args):
    with pytest.raises(ValueError):
        Grid(*args)


def test_eps_face_is_harmonic_mean():
    g = Grid(1.0, 3, [1.0, 3.0, 1.0])
    np.testing.assert_allclose(g.eps_face, [1.5, 1.5])
    assert g.eps_min == 1.0 and g.eps_max == 3.0


def test_gradient_of_constant_and_linear():
    g = Grid(1.0, 50)
    np.testing.assert_array_equal(face_gradient(g, np.full(50, 3.0)), 0.0)
    np.testing.assert_allclose(face_gradient(g, g.x), 1.0, rtol=1e-12)


def test_gradient_second_order():
    errs = []
    for N in (32, 64, 128):
        g = Grid(1.0, N)
        exact = -np.pi * np.sin(np.pi * g.x_faces)
        errs.append(np.max(np.abs(face_gradient(g, np.cos(np.pi * g.x)) - exact)))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.05)


def test_divergence_examples():
    g = Grid(1.0, 10)
    np.testing.assert_array_equal(divergence_of_face_flux(g, np.zeros(9)), 0.0)
    d = divergence_of_face_flux(g, np.ones(9))
    assert d[0] == pytest.approx(1 / g.h) and d[-1] == pytest.approx(-1 / g.h)
    np.testing.assert_array_equal(d[1:-1], 0.0)


@given(arrays(float, 31, elements=st.floats(-1e3, 1e3)))
def test_divergence_telescopes(j):
    g = Grid(1.0, 32)
    assert abs(integrate(g, divergence_of_face_flux(g, j))) <= 1e-12 * (1 + np.abs(j).sum())


@given(arrays(float, 40, elements=st.floats(-1e3, 1e3)), arrays(float, 39, elements=st.floats(-1e3, 1e3)))
def test_summation_by_parts(f, j):
    g = Grid(1.7, 40)
    lhs = integrate(g, f * divergence_of_face_flux(g, j))
    rhs = -integrate_faces(g, face_gradient(g, f) * j)
    scale = np.abs(f).max() * np.abs(j).max() * 40 + 1
    assert lhs == pytest.approx(rhs, abs=1e-12 * scale)


@given(arrays(float, 15, elements=st.floats(-1e3, 1e3)))
def test_face_to_cells_preserves_total(q):
    g = Grid(1.0, 16)
    assert integrate(g, face_to_cells(g, q)) == pytest.approx(integrate_faces(g, q), abs=1e-12 * (1 + np.abs(q).sum()))


def test_face_average():
    g = Grid(1.0, 4)
    np.testing.assert_allclose(face_average(g, [0.0, 2.0, 4.0, 8.0]), [1.0, 3.0, 6.0])


def test_integrate_examples():
    assert integrate(Grid(1.0, 7), np.ones(7)) == pytest.approx(1.0)
    assert integrate(Grid(2.5, 9), np.full(9, 3.0)) == pytest.approx(7.5)
    g = Grid(1.0, 100)
    assert integrate(g, g.x) == pytest.approx(0.5, abs=1e-15)


def test_shape_checks():
    g = Grid(1.0, 5)
    with pytest.raises(ValueError):
        face_gradient(g, np.zeros(4))
    with pytest.raises(ValueError):
        divergence_of_face_flux(g, np.zeros(5))


@pytest.mark.parametrize("L, expected", [(math.pi, 1.0), (1.0, 1 / math.pi**2), (2.0, 4 / math.pi**2)])
def test_poincare_constant(L, expected):
    assert poincare_constant(Grid(L, 8)) == pytest.approx(expected, rel=1e-15)


def _dirichlet(g, f):
    return g.h * np.sum(face_gradient(g, f) ** 2)


@given(st.integers(0, 2**32 - 1), st.sampled_from([128, 256]))
def test_discrete_poincare_random_fields(seed, N):
    g = Grid(1.0, N)
    f = np.random.default_rng(seed).standard_normal(N)
    f -= f.mean()
    assert integrate(g, f * f) <= poincare_constant(g) * _dirichlet(g, f)


@given(st.integers(0, 2**32 - 1))
def test_discrete_poincare_smooth_fields_within_second_order_slack(seed):
    # the lowest discrete mode has Rayleigh quotient (h/2)^2 / sin^2(pi h / 2L),
    # which exceeds (L/pi)^2 by a relative O(h^2): allow exactly that much
    g = Grid(1.0, 128)
    k = np.arange(1, 6)
    f = np.cos(np.pi * np.outer(g.x, k)) @ np.random.default_rng(seed).uniform(-1, 1, 5)
    slack = (np.pi * g.h / 2) ** 2 / np.sin(np.pi * g.h / 2) ** 2
    assert integrate(g, f * f) <= poincare_constant(g) * slack * _dirichlet(g, f) * (1 + 1e-12)


def test_discrete_poincare_constant_approaches_continuum_from_above():
    ratios = []
    for N in (32, 64, 128, 256):
        g = Grid(1.0, N)
        f = np.cos(np.pi * g.x)
        ratios.append(integrate(g, f * f) / _dirichlet(g, f) / poincare_constant(g))
    assert all(r > 1 for r in ratios)
    assert all(a > b for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] - 1 < 1e-4


def test_refined_grid_repeats_eps():
    g = Grid(1.0, 3, [1.0, 2.0, 3.0]).refined(2)
    np.testing.assert_array_equal(g.eps, [1, 1, 2, 2, 3, 3])
