import numpy as np
import pytest

from chemofluid import diagnostics as D
from chemofluid.fluid import project
from chemofluid.grid import Grid, gradient
from chemofluid.model import ModelParams
from chemofluid.transport import State

from test_grid import rand_faces


def uniform_state(g, n0=2.0, c0=0.5, t=0.0):
    return State(n=np.full(g.shape, n0), c=np.full(g.shape, c0), u=g.zeros_faces(), t=t)


def test_uniform_state_values():
    g = Grid((16, 16), (2.0, 1.0))
    r = D.evaluate(g, uniform_state(g), ModelParams())
    assert r.entropy == pytest.approx(g.volume * 2 * np.log(2), rel=1e-14)
    assert r.psi_energy == 0 and r.kinetic == 0
    assert (r.d1, r.d2, r.d3, r.d4) == (0, 0, 0, 0)
    assert r.mass == pytest.approx(4.0, rel=1e-15)
    assert D.evaluate(g, uniform_state(g, n0=1.0), ModelParams()).entropy == 0


def test_vacuum_entropy_is_zero():
    g = Grid((8, 8))
    assert D.evaluate(g, uniform_state(g, n0=0.0), ModelParams()).entropy == 0


def test_psi_energy_chain_rule_identity():
    g = Grid((32, 32))
    X, Y = g.cell_coords()
    c = 1 + 0.5 * np.cos(np.pi * X) * np.cos(2 * np.pi * Y)
    params = ModelParams(kinetics="linear")
    e = D.psi_energy(g, c, params.kinetics)
    # |grad Psi(c)|^2 = |grad c|^2 / c with c on faces as the squared mean root
    root = np.sqrt(c)
    direct = 0.0
    for ax, gr in enumerate(gradient(g, c)):
        lo = [slice(None)] * 2
        hi = [slice(None)] * 2
        lo[ax], hi[ax] = slice(None, -1), slice(1, None)
        cf = np.ones(gr.shape)
        inner = [slice(None)] * 2
        inner[ax] = slice(1, -1)
        cf[tuple(inner)] = (0.5 * (root[tuple(lo)] + root[tuple(hi)])) ** 2
        direct += np.sum(gr**2 / cf)
    direct *= 0.5 * g.cell_volume
    assert e == pytest.approx(direct, rel=1e-10)


def test_hessian_exact_on_quadratics_in_the_interior():
    g = Grid((16, 16))
    X, Y = g.cell_coords()
    c = X**2 + 3 * X * Y + 2 * Y**2
    H2 = D.hessian_frobenius_sq(g, c)
    expected = 2**2 + 2 * 3**2 + 4**2
    assert np.allclose(H2[1:-1, 1:-1], expected)


def test_dissipation_terms_nonnegative_and_floor_counted():
    g = Grid((16, 16))
    rng = np.random.default_rng(0)
    u, _ = project(g, rand_faces(g, rng))
    c = rng.uniform(0, 1, g.shape)
    c[0, 0] = 0.0
    s = State(n=rng.uniform(0, 2, g.shape), c=c, u=u)
    r = D.evaluate(g, s, ModelParams())
    assert min(r.d1, r.d2, r.d3, r.d4) >= 0
    assert r.floored_cells == 1
    s.c[0, 0] = 0.5
    assert D.evaluate(g, s, ModelParams()).floored_cells == 0


def test_accumulator_with_unit_exponent_is_mass_plus_eps_volume():
    g = Grid((8, 8))
    p = ModelParams(eps=0.01)
    recs = [D.evaluate(g, uniform_state(g, t=0.0), p, p_exponent=1.0)]
    for t in (0.1, 0.25, 0.5):
        recs.append(D.evaluate(g, uniform_state(g, t=t), p, prev=recs[-1], p_exponent=1.0))
    assert recs[-1].A2 == pytest.approx(0.5 * (recs[0].mass + 0.01 * g.volume), rel=1e-13)
    assert all(b.A2 >= a.A2 for a, b in zip(recs, recs[1:]))


def test_lp_norms_reported():
    g = Grid((8, 8))
    r = D.evaluate(g, uniform_state(g, n0=3.0), ModelParams(), lp=(2, 4))
    assert r.extras["n_L2"] == pytest.approx(3.0)
    assert r.extras["n_L4"] == pytest.approx(3.0)


def test_records_must_advance():
    g = Grid((8, 8))
    p = ModelParams()
    r1 = D.evaluate(g, uniform_state(g, t=1.0), p)
    with pytest.raises(ValueError):
        D.evaluate(g, uniform_state(g, t=0.5), p, prev=r1)


def test_csv_layout(tmp_path):
    g = Grid((8, 8))
    p = ModelParams()
    recs = [D.evaluate(g, uniform_state(g), p)]
    recs.append(D.evaluate(g, uniform_state(g, t=0.1), p, prev=recs[0]))
    path = tmp_path / "d.csv"
    D.write_csv(path, recs)
    lines = path.read_text().splitlines()
    assert lines[0].split(",") == list(D.CSV_COLUMNS)
    assert lines[2].split(",")[0] == "0.10000000000000001"
    back = D.read_csv(path)
    assert back["mass"][1] == recs[1].mass


def test_budget_stationary_passes_with_zero_constant():
    g = Grid((8, 8))
    p = ModelParams()
    recs = [D.evaluate(g, uniform_state(g, t=0.1 * k), p) for k in range(6)]
    rep = D.energy_budget_check(recs, phi_is_constant=True)
    assert rep.passed and rep.implied_constant == 0
    rep = D.energy_budget_check(recs, phi_is_constant=False)
    assert rep.passed and rep.implied_constant == 0


def test_budget_flags_energy_growth_and_bad_sampling():
    g = Grid((8, 8))
    p = ModelParams()
    recs = [D.evaluate(g, uniform_state(g, n0=1.0 + 0.1 * k, t=0.1 * k), p) for k in range(6)]
    assert not D.energy_budget_check(recs, phi_is_constant=True).passed
    recs[3].t = 0.33
    with pytest.raises(ValueError):
        D.energy_budget_check(recs, phi_is_constant=True)
    with pytest.raises(ValueError):
        D.energy_budget_check(recs[:1], phi_is_constant=True)


def test_weak_residual_trivial_cases():
    g = Grid((12, 12))
    p = ModelParams()
    traj = [uniform_state(g, t=0.01 * k) for k in range(11)]
    phi = D.CosineTestFunction((2, 1), (1.0, 1.0), 0.1)
    for which in ("n-eq", "c-eq"):
        assert D.weak_residual(g, traj, p, phi, which) <= 1e-10
    zero = D.CosineTestFunction((1, 1), (1.0, 1.0), 0.1)
    zero.value = lambda X, t: np.zeros(np.shape(X[0]))
    zero.grad = lambda X, t: [np.zeros(np.shape(X[0]))] * 2
    assert D.weak_residual(g, traj, p, zero, "n-eq") == 0.0
    stream = D.StreamTestFunction((1.0, 1.0), 0.1, (1, 0))
    assert D.weak_residual(g, traj, p.replace(phi_grad=(0.0, 0.0)), stream, "u-eq") <= 1e-12


def test_weak_residual_support_violation():
    g = Grid((12, 12))
    traj = [uniform_state(g, t=0.01 * k) for k in range(11)]
    late = D.CosineTestFunction((1, 1), (1.0, 1.0), 0.2)
    with pytest.raises(ValueError):
        D.weak_residual(g, traj, ModelParams(), late, "n-eq")
    with pytest.raises(ValueError):
        D.weak_residual(g, traj, ModelParams(), late, "bogus")


def test_stream_test_function_is_discretely_solenoidal():
    from chemofluid.fluid import divergence_norm
    g = Grid((16, 12))
    f = D.StreamTestFunction((1.0, 1.0), 1.0, (1, 0))
    assert divergence_norm(g, f.on_faces(g, 0.3)) < 1e-12
    vals = f.on_faces(g, 0.3)
    assert np.allclose(vals[0][[0, -1]], 0, atol=1e-15) and np.allclose(vals[1][:, [0, -1]], 0, atol=1e-15)
