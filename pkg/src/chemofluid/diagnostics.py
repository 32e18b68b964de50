"""Energy components, dissipation integrals, space-time accumulators and
weak-formulation residuals of simulated trajectories."""
from __future__ import annotations

import csv
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .fluid import enstrophy, kinetic_energy, velocity_gradient_terms, yosida_smooth
from .grid import cell_gradient, cells_to_faces, faces_to_cells, gradient
from .grid.ops import _sl
from .model import D_eps, F_eps, F_eps_prime, psi

CSV_COLUMNS = (
    "t", "mass", "c_max", "c_min", "n_max", "entropy", "psi_energy", "kinetic",
    "combined_energy", "d1", "d2", "d3", "d4",
    "A1", "A2", "A3", "A4", "A5", "A6", "A7", "floored_cells",
)


@dataclass
class DiagnosticsRecord:
    """One sample of every monitored functional.

    ``d1..d4`` are the instantaneous dissipation integrals, ``A1..A7`` their
    running space-time integrals (trapezoidal in time).  ``i1..i3`` hold the
    instantaneous integrands of ``A1..A3`` so the next record can continue
    the trapezoid.
    """

    t: float
    mass: float
    c_max: float
    c_min: float
    n_max: float
    entropy: float
    psi_energy: float
    kinetic: float
    combined_energy: float
    d1: float
    d2: float
    d3: float
    d4: float
    A1: float = 0.0
    A2: float = 0.0
    A3: float = 0.0
    A4: float = 0.0
    A5: float = 0.0
    A6: float = 0.0
    A7: float = 0.0
    floored_cells: int = 0
    i1: float = 0.0
    i2: float = 0.0
    i3: float = 0.0
    extras: dict = field(default_factory=dict)

    def row(self):
        return [getattr(self, k) for k in CSV_COLUMNS]


def _entropy_density(n):
    n = np.asarray(n, dtype=float)
    safe = np.where(n > 0, n, 1.0)
    return np.where(n > 0, n * np.log(safe), 0.0)


def hessian_frobenius_sq(grid, c):
    """``|D^2 c|^2`` at cell centres from centred second differences.

    Mirror ghosts impose the zero normal derivative; mixed derivatives use
    the four-corner stencil.
    """
    padded = np.pad(c, 1, mode="edge")
    inner = tuple(slice(1, -1) for _ in range(grid.dim))
    total = np.zeros(grid.shape)

    def shifted(offsets):
        idx = tuple(slice(1 + o, padded.shape[k] - 1 + o) for k, o in enumerate(offsets))
        return padded[idx]

    for d in range(grid.dim):
        e_d = [0] * grid.dim
        e_d[d] = 1
        minus = [-x for x in e_d]
        second = (shifted(e_d) - 2.0 * padded[inner] + shifted(minus)) / grid.h[d] ** 2
        total += second**2
        for e in range(d + 1, grid.dim):
            def corner(sd, se):
                off = [0] * grid.dim
                off[d] = sd
                off[e] = se
                return shifted(off)

            mixed = (corner(1, 1) - corner(1, -1) - corner(-1, 1) + corner(-1, -1)) / (
                4.0 * grid.h[d] * grid.h[e]
            )
            total += 2.0 * mixed**2
    return total


def psi_energy(grid, c, preset, c_floor=1e-12):
    """``0.5 * int |grad Psi(c)|^2`` with face differences of ``Psi(c)``."""
    P = psi(preset, np.maximum(c, c_floor), c_floor=c_floor)
    return 0.5 * sum(float(np.sum(g**2)) for g in gradient(grid, P)) * grid.cell_volume


def evaluate(grid, state, params, prev=None, p_exponent=None, lp=()):
    """Evaluate a :class:`DiagnosticsRecord` for ``state``.

    Integrals are midpoint sums; ``c`` below ``params.c_floor`` is replaced
    by the floor in singular denominators and counted in ``floored_cells``.
    Accumulators continue from ``prev`` by the trapezoidal rule.
    ``p_exponent`` defaults to ``(3m + 2)/3``; ``lp`` lists exponents whose
    ``||n||_p`` is stored in ``extras``.
    """
    vol = grid.cell_volume
    eps, m = params.eps, params.m
    n = np.maximum(grid.check_cells(state.n, "n"), 0.0)
    c = grid.check_cells(state.c, "c")
    floored = int(np.count_nonzero(c < params.c_floor))
    cf = np.maximum(c, params.c_floor)
    K = params.energy_weight

    entropy = float(np.sum(_entropy_density(n))) * vol
    psi_e = psi_energy(grid, c, params.kinetics, params.c_floor)
    kinetic = K * 2.0 * kinetic_energy(grid, state.u)

    n_faces = cells_to_faces(grid, n)
    grad_n = gradient(grid, n)
    d1 = sum(float(np.sum((nf + eps) ** (m - 2.0) * g**2)) for nf, g in zip(n_faces, grad_n)) * vol
    d2 = float(np.sum(hessian_frobenius_sq(grid, c) / cf)) * vol
    gc = cell_gradient(grid, c)
    gc2 = sum(g**2 for g in gc)
    d3 = float(np.sum(gc2**2 / cf**3)) * vol
    d4 = enstrophy(grid, state.u)

    i1 = sum(float(np.sum(g**2)) for g in gradient(grid, n ** (0.5 * m))) * vol
    p = (3.0 * m + 2.0) / 3.0 if p_exponent is None else p_exponent
    i2 = float(np.sum((n + eps) ** p)) * vol
    speed2 = sum(v**2 for v in faces_to_cells(grid, state.u))
    i3 = float(np.sum(speed2 ** (5.0 / 3.0))) * vol

    rec = DiagnosticsRecord(
        t=float(state.t), mass=float(np.sum(state.n)) * vol,
        c_max=float(c.max()), c_min=float(c.min()), n_max=float(state.n.max()),
        entropy=entropy, psi_energy=psi_e, kinetic=kinetic,
        combined_energy=entropy + psi_e + kinetic,
        d1=d1, d2=d2, d3=d3, d4=d4, floored_cells=floored, i1=i1, i2=i2, i3=i3,
    )
    for q in lp:
        rec.extras[f"n_L{q:g}"] = (float(np.sum(n**q)) * vol) ** (1.0 / q)
    if prev is not None:
        dt = rec.t - prev.t
        if dt < 0:
            raise ValueError("records must advance in time")
        for acc, a, b in (("A1", prev.i1, i1), ("A2", prev.i2, i2), ("A3", prev.i3, i3),
                          ("A4", prev.d1, d1), ("A5", prev.d2, d2), ("A6", prev.d3, d3),
                          ("A7", prev.d4, d4)):
            setattr(rec, acc, getattr(prev, acc) + 0.5 * dt * (a + b))
    return rec


def write_csv(path, records):
    """Diagnostics CSV: fixed column order, header row, 17 significant digits."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in records:
            w.writerow([str(v) if k == "floored_cells" else f"{v:.17g}"
                        for k, v in zip(CSV_COLUMNS, r.row())])


def read_csv(path):
    """Read a diagnostics CSV back into a dict of column arrays."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    return {k: np.array([float(r[i]) for r in body]) for i, k in enumerate(header)}


# --- energy budget ------------------------------------------------------------


@dataclass
class BudgetReport:
    rates: np.ndarray
    dissipation: np.ndarray
    implied: np.ndarray
    implied_constant: float
    max_increase: float
    first_quartile_max: float
    last_quartile_max: float
    phi_is_constant: bool
    passed: bool

    def summary(self):
        return (f"implied constant {self.implied_constant:.6g}, max energy increase "
                f"{self.max_increase:.3e}, quartiles {self.first_quartile_max:.6g} -> "
                f"{self.last_quartile_max:.6g}: {'PASS' if self.passed else 'FAIL'}")


def energy_budget_check(records, phi_is_constant, slack=1e-8, K=1.0, D1=1.0, rtol_sampling=1e-9):
    """Audit the combined energy inequality along a run.

    For each sampling interval computes ``dE/dt + (D1 d1 + d2 + d3 + d4)/(2K)``
    (dissipation averaged over the interval end points).  The implied
    constant is the supremum, floored at 0 since the bound it estimates is
    nonnegative.  Without a potential the combined energy must not increase
    by more than ``slack``; with one, the implied constant must stay finite
    and its last-quartile maximum must not exceed twice the first-quartile
    maximum plus ``slack``.
    """
    if len(records) < 2:
        raise ValueError("need at least two records")
    t = np.array([r.t for r in records])
    dts = np.diff(t)
    if np.any(dts <= 0) or np.max(np.abs(dts - dts.mean())) > rtol_sampling * dts.mean():
        raise ValueError("records are not uniformly sampled in time")
    E = np.array([r.combined_energy for r in records])
    diss = np.array([D1 * r.d1 + r.d2 + r.d3 + r.d4 for r in records])
    rates = np.diff(E) / dts
    mean_diss = 0.5 * (diss[1:] + diss[:-1])
    implied = rates + mean_diss / (2.0 * K)
    implied_constant = max(0.0, float(np.max(implied)))
    max_increase = float(np.max(np.diff(E)))
    quart = np.array_split(np.maximum(implied, 0.0), 4) if implied.size >= 4 else [np.maximum(implied, 0.0)] * 2
    q1 = float(np.max(quart[0]))
    q4 = float(np.max(quart[-1]))
    finite = bool(np.all(np.isfinite(implied)))
    if phi_is_constant:
        passed = finite and max_increase <= slack
    else:
        passed = finite and q4 <= 2.0 * q1 + slack
    return BudgetReport(rates, mean_diss, implied, implied_constant, max_increase,
                        q1, q4, phi_is_constant, passed)


# --- weak formulation ---------------------------------------------------------


def _temporal(t, t_end):
    t = np.asarray(t, dtype=float)
    return np.where(t < t_end, np.cos(0.5 * np.pi * np.minimum(t, t_end) / t_end) ** 2, 0.0)


@dataclass
class CosineTestFunction:
    """``phi(x, t) = cos^2(pi t / (2 t_end)) * prod_i cos(k_i pi x_i / L_i)``.

    Vanishes for ``t >= t_end``; its normal derivative vanishes on the walls.
    """

    modes: tuple
    lengths: tuple
    t_end: float

    def value(self, X, t):
        out = _temporal(t, self.t_end) * np.ones(np.shape(X[0]))
        for k, x, L in zip(self.modes, X, self.lengths):
            out = out * np.cos(k * np.pi * x / L)
        return out

    def grad(self, X, t):
        theta = _temporal(t, self.t_end)
        out = []
        for d in range(len(X)):
            g = theta * np.ones(np.shape(X[0]))
            for e, (k, x, L) in enumerate(zip(self.modes, X, self.lengths)):
                w = k * np.pi / L
                g = g * (-w * np.sin(w * x) if e == d else np.cos(w * x))
            out.append(g)
        return out


@dataclass
class StreamTestFunction:
    """Solenoidal field ``(dA/dy, -dA/dx[, 0])`` from a stream function
    ``A = theta(t) prod sin^2(pi x_i/L_i) cos(k_i pi x_i/L_i)``.

    It and its first derivatives vanish on the walls.  On the grid it is
    sampled as the discrete curl of ``A`` at the nodes, so it is exactly
    discretely divergence free.  ``modes`` (the ``k_i``, default 0) break
    the mirror symmetries of the plain ``sin^2`` product.
    """

    lengths: tuple
    t_end: float
    modes: tuple = ()

    def _s(self, x, L, order, k=0):
        w = np.pi / L
        a = (np.sin(w * x) ** 2, w * np.sin(2 * w * x), 2 * w**2 * np.cos(2 * w * x))
        kw = k * w
        b = (np.cos(kw * x), -kw * np.sin(kw * x), -(kw**2) * np.cos(kw * x))
        if order == 0:
            return a[0] * b[0]
        if order == 1:
            return a[1] * b[0] + a[0] * b[1]
        return a[2] * b[0] + 2 * a[1] * b[1] + a[0] * b[2]

    def _k(self, i):
        return self.modes[i] if i < len(self.modes) else 0

    def potential(self, X, t):
        out = _temporal(t, self.t_end) * np.ones(np.shape(X[0]))
        for i, (x, L) in enumerate(zip(X, self.lengths)):
            out = out * self._s(x, L, 0, self._k(i))
        return out

    def _dA(self, X, t, orders):
        out = _temporal(t, self.t_end) * np.ones(np.shape(X[0]))
        for i, (x, L, o) in enumerate(zip(X, self.lengths, orders)):
            out = out * self._s(x, L, o, self._k(i))
        return out

    def value(self, X, t):
        dim = len(X)
        ox = [0] * dim
        oy = [0] * dim
        oy[1] = 1
        ox[0] = 1
        comps = [self._dA(X, t, oy), -self._dA(X, t, ox)]
        if dim == 3:
            comps.append(np.zeros(np.shape(X[0])))
        return comps

    def grad_component(self, d, e, X, t):
        """``d phi_d / d x_e`` at points ``X``."""
        dim = len(X)
        if d >= 2:
            return np.zeros(np.shape(X[0]))
        orders = [0] * dim
        orders[1 if d == 0 else 0] += 1
        orders[e] += 1
        sign = 1.0 if d == 0 else -1.0
        return sign * self._dA(X, t, orders)

    def on_faces(self, grid, t):
        """Discrete curl of ``A`` sampled at the nodes, one array per face axis."""
        dim = grid.dim
        out = []
        for d in range(dim):
            if d >= 2:
                out.append(np.zeros(grid.face_shape(d)))
                continue
            other = 1 - d
            axes = []
            for k in range(dim):
                if k == d or k == other:
                    axes.append(grid.nodes_1d(k))
                else:
                    axes.append(grid.centers_1d(k))
            A = self.potential(np.meshgrid(*axes, indexing="ij"), t)
            diff = np.diff(A, axis=other) / grid.h[other]
            out.append(diff if d == 0 else -diff)
        return tuple(out)


def _cell_X(grid):
    return grid.cell_coords()


def _edge_X(grid, d, e):
    """Points where ``velocity_gradient_terms`` places ``d_e u_d``."""
    if d == e:
        return grid.cell_coords()
    axes = [grid.nodes_1d(k) if k in (d, e) else grid.centers_1d(k) for k in range(grid.dim)]
    return np.meshgrid(*axes, indexing="ij")


WEAK_EQUATIONS = ("n-eq", "c-eq", "u-eq")


def weak_residual(grid, trajectory, params, test_fn, which, regularized=True, tol=1e-10):
    """Defect of the space-time weak identity for one equation.

    ``trajectory`` is a sequence of states at uniformly spaced times.  Time
    derivatives stay on the data as forward differences paired with the
    test function at the left sample; the remaining integrals use the left
    sample too.  Spatial integrals are cell (or face/edge) midpoint sums
    with centred cell gradients of the data and exact gradients of the test
    function.  With ``regularized`` the coefficients of the approximating
    system (``D_eps``, ``n F_eps'(n)``, ``F_eps(n)``, ``Y_eps u``) are used.
    """
    if which not in WEAK_EQUATIONS:
        raise ValueError(f"which must be one of {WEAK_EQUATIONS}")
    if grid.periodic:
        raise ValueError("weak residuals are defined for box grids")
    if len(trajectory) < 2:
        raise ValueError("need at least two samples")
    times = np.array([s.t for s in trajectory])
    steps = np.diff(times)
    if np.any(steps <= 0) or np.max(np.abs(steps - steps.mean())) > 1e-9 * steps.mean():
        raise ValueError("trajectory is not uniformly sampled")
    tau = float(steps.mean())
    t_last = times[-1]
    vol = grid.cell_volume
    X = _cell_X(grid)

    if which == "u-eq":
        end_vals = test_fn.on_faces(grid, t_last)
        if max(float(np.max(np.abs(v))) for v in end_vals) > 1e-12:
            raise ValueError("test function must vanish at the final time")
        for d, comp in enumerate(test_fn.on_faces(grid, times[0])):
            walls = np.concatenate([comp[_sl(grid.dim, d, 0)].ravel(), comp[_sl(grid.dim, d, -1)].ravel()])
            if walls.size and np.max(np.abs(walls)) > 1e-12:
                raise ValueError("test function must vanish on the boundary")
    else:
        if np.max(np.abs(test_fn.value(X, t_last))) > 1e-12:
            raise ValueError("test function must vanish at the final time")

    eps = params.eps
    chi = params.kinetics.chi
    f = params.kinetics.f
    total = 0.0
    for k in range(len(trajectory) - 1):
        s0, s1 = trajectory[k], trajectory[k + 1]
        tk = times[k]
        if which == "u-eq":
            phi_f = test_fn.on_faces(grid, tk)
            total += grid.inner_faces(tuple(a - b for a, b in zip(s1.u, s0.u)), phi_f)
            u_c = faces_to_cells(grid, s0.u)
            if params.kappa != 0.0:
                v = yosida_smooth(grid, s0.u, eps, tol=tol) if regularized else s0.u
                v_c = faces_to_cells(grid, v)
                conv = 0.0
                for i in range(grid.dim):
                    for j in range(grid.dim):
                        conv += np.sum(u_c[i] * v_c[j] * test_fn.grad_component(i, j, X, tk))
                total += tau * (-params.kappa * conv * vol)
            visc = 0.0
            for d, e, vals, w in velocity_gradient_terms(grid, s0.u):
                visc += np.sum(w * vals * test_fn.grad_component(d, e, _edge_X(grid, d, e), tk))
            phi_c = test_fn.value(X, tk)
            force = sum(s0.n * g * p for g, p in zip(params.phi_grad, phi_c))
            total += tau * (visc - float(np.sum(force)) * vol)
            continue

        phi = test_fn.value(X, tk)
        gphi = test_fn.grad(X, tk)
        u_c = faces_to_cells(grid, s0.u)
        q0, q1 = (s0.n, s1.n) if which == "n-eq" else (s0.c, s1.c)
        time_term = float(np.sum((q1 - q0) * phi)) * vol
        transport = float(np.sum(q0 * sum(a * b for a, b in zip(u_c, gphi)))) * vol
        gq = cell_gradient(grid, q0)
        if which == "n-eq":
            n = np.maximum(s0.n, 0.0)
            D = D_eps(params, n) if regularized else params.diff_coeff * np.where(n > 0, n, 0.0) ** (params.m - 1.0)
            carrier = n * F_eps_prime(eps, n) if regularized else n
            gc = cell_gradient(grid, s0.c)
            flux = sum((D * a - carrier * chi(s0.c) * b) * g for a, b, g in zip(gq, gc, gphi))
            total += time_term + tau * (-transport + float(np.sum(flux)) * vol)
        else:
            n = np.maximum(s0.n, 0.0)
            source = (F_eps(eps, n) if regularized else n) * f(np.maximum(s0.c, 0.0))
            diff = sum(a * g for a, g in zip(gq, gphi))
            total += time_term + tau * (-transport + float(np.sum(diff + source * phi)) * vol)
    return abs(total)
