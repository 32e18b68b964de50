import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chemofluid.errors import SolverError, StabilityError
from chemofluid.grid import (
    Grid,
    advective_flux,
    cell_gradient,
    cells_to_faces,
    courant_number,
    dirichlet_laplacian_matrix,
    divergence,
    faces_to_cells,
    gradient,
    helmholtz_dirichlet_solve,
    helmholtz_neumann_solve,
    laplacian,
    neumann_laplacian_matrix,
    poisson_neumann_solve,
    read_snapshot,
    upwind_advect,
    vector_laplacian,
    write_csv,
    write_snapshot,
)
from chemofluid.grid.ops import donor_values

GRIDS = [
    Grid((8, 6), (1.0, 0.75)),
    Grid((8, 8), bc="periodic"),
    Grid((6, 5, 4), (1.0, 1.0, 0.8)),
    Grid((6, 6, 6), bc="periodic"),
]


def rand_faces(grid, rng, walls=True):
    u = tuple(rng.standard_normal(grid.face_shape(d)) for d in range(grid.dim))
    if walls and not grid.periodic:
        for d, c in enumerate(u):
            idx = [slice(None)] * grid.dim
            for end in (0, -1):
                idx[d] = end
                c[tuple(idx)] = 0.0
    return u


def test_grid_basics():
    g = Grid((4, 8), (2.0, 1.0))
    assert g.h == (0.5, 0.125) and g.volume == 2.0
    assert g.face_shape(0) == (5, 8)
    assert Grid((4, 8), bc="periodic").face_shape(0) == (4, 8)
    assert Grid.square(16, dim=3).shape == (16, 16, 16)
    with pytest.raises(ValueError):
        Grid((3, 8))
    with pytest.raises(ValueError):
        Grid((8,))
    with pytest.raises(ValueError):
        Grid((8, 8), bc="slip")


@pytest.mark.parametrize("grid", GRIDS, ids=str)
def test_divergence_is_minus_gradient_adjoint(grid):
    rng = np.random.default_rng(1)
    q = rng.standard_normal(grid.shape)
    u = rand_faces(grid, rng)
    lhs = grid.integrate(q * divergence(grid, u))
    rhs = -grid.inner_faces(gradient(grid, q), u)
    assert abs(lhs - rhs) < 1e-12 * (1 + abs(lhs))


@pytest.mark.parametrize("grid", GRIDS, ids=str)
def test_laplacian_conserves_and_annihilates_constants(grid):
    rng = np.random.default_rng(2)
    q = rng.standard_normal(grid.shape)
    assert abs(grid.integrate(laplacian(grid, q))) < 1e-11
    assert np.max(np.abs(laplacian(grid, np.full(grid.shape, 3.0)))) == 0.0


@pytest.mark.parametrize("grid", GRIDS, ids=str)
def test_sparse_stencils_match_operators(grid):
    rng = np.random.default_rng(3)
    q = rng.standard_normal(grid.shape)
    A = neumann_laplacian_matrix(grid)
    assert np.allclose((A @ q.ravel()).reshape(grid.shape), laplacian(grid, q), atol=1e-10)
    u = rand_faces(grid, rng)
    Lu = vector_laplacian(grid, u)
    for d in range(grid.dim):
        M = dirichlet_laplacian_matrix(grid, d)
        comp = u[d]
        if not grid.periodic:
            inner = tuple(slice(1, -1) if k == d else slice(None) for k in range(grid.dim))
            got = (M @ comp[inner].ravel()).reshape(comp[inner].shape)
            assert np.allclose(got, Lu[d][inner], atol=1e-9)
        else:
            got = (M @ comp.ravel()).reshape(comp.shape)
            assert np.allclose(got, Lu[d], atol=1e-9)


def test_gradient_of_linear_field():
    g = Grid((8, 8))
    X, Y = g.cell_coords()
    gx, gy = gradient(g, 2 * X + 3 * Y)
    assert np.allclose(gx[1:-1], 2) and np.allclose(gy[:, 1:-1], 3)
    assert np.all(gx[[0, -1]] == 0) and np.all(gy[:, [0, -1]] == 0)


def test_interpolation_and_donor():
    g = Grid((4, 4))
    q = np.arange(16.0).reshape(4, 4)
    fx, _ = cells_to_faces(g, q)
    assert np.allclose(fx[1:-1], 0.5 * (q[1:] + q[:-1]))
    assert np.allclose(fx[0], q[0]) and np.allclose(fx[-1], q[-1])
    vel = np.ones(g.face_shape(0))
    dv = donor_values(g, q, vel, 0)
    assert np.allclose(dv[1:-1], q[:-1]) and np.all(dv[[0, -1]] == 0)
    dv = donor_values(g, q, -vel, 0)
    assert np.allclose(dv[1:-1], q[1:])
    u = (fx, np.zeros(g.face_shape(1)))
    assert faces_to_cells(g, u)[0].shape == g.shape
    assert len(cell_gradient(g, q)) == 2


@pytest.mark.parametrize("grid", GRIDS, ids=str)
@pytest.mark.parametrize("method", ["direct", "cg"])
def test_poisson_neumann(grid, method):
    rng = np.random.default_rng(4)
    rhs = rng.standard_normal(grid.shape)
    rhs -= rhs.mean()
    p = poisson_neumann_solve(grid, rhs, tol=1e-10, method=method)
    assert abs(p.mean()) < 1e-12
    res = np.max(np.abs(laplacian(grid, p) - rhs)) / np.max(np.abs(rhs))
    assert res < 1e-9


def test_poisson_rejects_nonzero_mean():
    g = Grid((8, 8))
    with pytest.raises(SolverError):
        poisson_neumann_solve(g, np.ones(g.shape))


@pytest.mark.parametrize("grid", GRIDS, ids=str)
@pytest.mark.parametrize("method", ["direct", "cg"])
def test_helmholtz_solvers(grid, method):
    rng = np.random.default_rng(5)
    rhs = rng.standard_normal(grid.shape)
    c = helmholtz_neumann_solve(grid, rhs, 0.3, method=method)
    assert np.max(np.abs(c - 0.3 * laplacian(grid, c) - rhs)) < 1e-9
    u = rand_faces(grid, rng)
    w = helmholtz_dirichlet_solve(grid, u, 0.3, method=method)
    Lw = vector_laplacian(grid, w)
    for d in range(grid.dim):
        assert np.max(np.abs(w[d] - 0.3 * Lw[d] - u[d])) < 1e-9


def test_helmholtz_neumann_is_contractive_in_max():
    g = Grid((16, 16))
    rng = np.random.default_rng(6)
    rhs = rng.uniform(0, 1, g.shape)
    out = helmholtz_neumann_solve(g, rhs, 0.05)
    assert out.max() <= rhs.max() + 1e-12 and out.min() >= rhs.min() - 1e-12
    assert abs(g.integrate(out) - g.integrate(rhs)) < 1e-12


def test_cg_reports_failure():
    g = Grid((16, 16))
    rhs = np.random.default_rng(0).standard_normal(g.shape)
    rhs -= rhs.mean()
    with pytest.raises(SolverError):
        poisson_neumann_solve(g, rhs, tol=1e-14, method="cg", maxiter=2)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.05, 1.0))
def test_upwind_advect_is_conservative_and_monotone(seed, courant):
    g = Grid((8, 8))
    rng = np.random.default_rng(seed)
    q = rng.uniform(0, 1, g.shape)
    u = rand_faces(g, rng)
    dt = courant / courant_number(g, u, 1.0)
    out = upwind_advect(g, q, u, dt)
    assert abs(g.integrate(out) - g.integrate(q)) < 1e-12
    assert out.min() >= -1e-12


def test_upwind_advect_rejects_large_courant():
    g = Grid((8, 8))
    u = rand_faces(g, np.random.default_rng(0))
    dt = 1.5 / courant_number(g, u, 1.0)
    with pytest.raises(StabilityError):
        upwind_advect(g, np.ones(g.shape), u, dt)


def test_advective_flux_walls_are_zero():
    g = Grid((6, 6))
    u = tuple(np.ones(g.face_shape(d)) for d in range(2))
    F = advective_flux(g, np.ones(g.shape), u)
    assert np.all(F[0][[0, -1]] == 0) and np.all(F[1][:, [0, -1]] == 0)


def test_snapshot_round_trip(tmp_path):
    g = Grid((5, 4), (1.0, 0.8))
    q = np.random.default_rng(1).standard_normal(g.face_shape(1))
    path = tmp_path / "u.cfx"
    write_snapshot(path, g, q, 0.25, "uy", role="face-y")
    head, values = read_snapshot(path)
    assert head["time"] == 0.25 and head["name"] == "uy" and head["role"] == "face-y"
    assert tuple(head["sizes"]) == g.face_shape(1)
    assert np.array_equal(values, q)
    raw = path.read_bytes()
    assert raw[:4] == b"CFX1"
    # x fastest in the payload
    payload = np.frombuffer(raw[-q.size * 8:], dtype="<f8")
    assert payload[1] == q[1, 0]


def test_snapshot_rejects_bad_magic(tmp_path):
    p = tmp_path / "bad.cfx"
    p.write_bytes(b"XXXX" + bytes(32))
    with pytest.raises(ValueError):
        read_snapshot(p)


def test_csv_export(tmp_path):
    q = np.arange(6.0).reshape(3, 2)
    p = tmp_path / "q.csv"
    write_csv(p, q)
    lines = p.read_text().splitlines()
    assert lines[0] == "i,j,value"
    assert len(lines) == 7
