import math

import numpy as np
import pytest
import sympy as sp
from scipy import integrate

from chemofluid.reference import (
    SeriesSolution,
    barenblatt,
    barenblatt_constant,
    barenblatt_exponents,
    barenblatt_radius,
    heat_neumann_solution,
)


def test_constant_mode_is_steady():
    x = [np.linspace(0, 1, 5), np.linspace(0, 1, 5)]
    for t in (0.0, 0.3, 10.0):
        assert np.allclose(heat_neumann_solution({(0, 0): 2.5}, x, t), 2.5)


def test_single_mode_decays_by_e():
    L = 2.0
    t = L**2 / np.pi**2
    x = [np.array([0.0]), np.array([0.0])]
    v = heat_neumann_solution({(1, 0): 1.0}, x, t, lengths=(L, 1.0))
    assert math.isclose(v[0], math.exp(-1), rel_tol=1e-14)


def test_superposition():
    X = np.meshgrid(np.linspace(0, 1, 7), np.linspace(0, 1, 7), indexing="ij")
    a, b = {(1, 2): 0.3}, {(2, 0): -0.7, (0, 0): 1.0}
    both = {**a, **b}
    s = SeriesSolution((1.0, 1.0), both)
    assert np.allclose(s(X, 0.05), heat_neumann_solution(a, X, 0.05) + heat_neumann_solution(b, X, 0.05))
    assert s.eigenvalue((1, 2)) == pytest.approx(5 * np.pi**2)


def test_series_maximum_principle():
    X = np.meshgrid(np.linspace(0, 1, 33), np.linspace(0, 1, 33), indexing="ij")
    modes = {(0, 0): 1.0, (1, 1): 0.4, (3, 2): 0.2}
    m0 = np.max(np.abs(heat_neumann_solution(modes, X, 0.0)))
    for t in (0.001, 0.01, 0.1):
        assert np.max(np.abs(heat_neumann_solution(modes, X, t))) <= m0


def test_series_rejects_negative_time():
    with pytest.raises(ValueError):
        heat_neumann_solution({(0, 0): 1.0}, [np.zeros(1), np.zeros(1)], -1.0)


@pytest.mark.parametrize("m,d", [(2, 1), (2, 2), (3, 2), (2, 3)])
def test_barenblatt_solves_the_pde_symbolically(m, d):
    r, t, a, C = sp.symbols("r t a C", positive=True)
    beta = sp.Rational(1, d * (m - 1) + 2)
    alpha = d * beta
    k = beta * (m - 1) / (2 * m)
    s = a * t / m
    U = s ** (-alpha) * (C - k * r**2 * s ** (-2 * beta)) ** sp.Rational(1, m - 1)
    # radial form of div(a U^(m-1) grad U)
    flux = a * U ** (m - 1) * sp.diff(U, r)
    rhs = sp.diff(r ** (d - 1) * flux, r) / r ** (d - 1)
    assert sp.simplify(sp.diff(U, t) - rhs) == 0


@pytest.mark.parametrize("m,d", [(2.0, 2), (3.0, 2), (1.5, 2), (2.0, 1)])
def test_barenblatt_mass(m, d):
    M, a, t = 0.7, 1.3, 0.02
    R = barenblatt_radius(m, a, M, t, d)
    f = lambda r: barenblatt(m, a, M, np.array([r]), t, dim=d)[0]
    if d == 1:
        mass = 2 * integrate.quad(f, 0, R, epsabs=0, epsrel=1e-12)[0]
    else:
        mass = 2 * np.pi * integrate.quad(lambda r: r * f(r), 0, R, epsabs=0, epsrel=1e-12)[0]
    assert mass == pytest.approx(M, rel=1e-6)


def test_barenblatt_mass_on_a_grid():
    n = 400
    x = (np.arange(n) + 0.5) / n - 0.5
    X = np.meshgrid(x, x, indexing="ij")
    v = barenblatt(2.0, 1.0, 1.0, list(X), 1e-3)
    assert v.sum() / n**2 == pytest.approx(1.0, rel=1e-3)


def test_barenblatt_scaling_laws():
    m, a, M, d = 2.0, 1.0, 1.0, 2
    _, beta = barenblatt_exponents(m, d)
    t = 0.01
    assert barenblatt_radius(m, a, M, 2 ** (1 / beta) * t, d) / barenblatt_radius(m, a, M, t, d) == pytest.approx(2, rel=1e-6)
    origin = lambda tt: barenblatt(m, a, M, np.zeros(1), tt, dim=d)[0]
    assert origin(t) / origin(4 * t) == pytest.approx(4 ** (d * beta), rel=1e-12)


def test_barenblatt_support_and_sign():
    m, a, M = 2.0, 1.0, 1.0
    R = barenblatt_radius(m, a, M, 0.01, 2)
    r = np.linspace(0, 2 * R, 201)
    v = barenblatt(m, a, M, r, 0.01, dim=2)
    assert np.all(v >= 0)
    assert np.all(v[r > R * (1 + 1e-12)] == 0)
    assert np.all(v[r < R * (1 - 1e-9)] > 0)
    # continuity at the free boundary
    assert barenblatt(m, a, M, np.array([R * (1 - 1e-9)]), 0.01, dim=2)[0] < 1e-6


def test_barenblatt_constant_independent_of_a():
    assert barenblatt_constant(2.0, 1.0, 1.0, 2) == barenblatt_constant(2.0, 5.0, 1.0, 2)


@pytest.mark.parametrize("kw", [dict(m=1.0), dict(m=0.5)])
def test_barenblatt_rejects_linear(kw):
    with pytest.raises(ValueError):
        barenblatt(kw["m"], 1.0, 1.0, np.zeros(1), 1.0, dim=2)


def test_barenblatt_rejects_nonpositive_time():
    with pytest.raises(ValueError):
        barenblatt(2.0, 1.0, 1.0, np.zeros(1), 0.0, dim=2)
